#pragma once

#include "solvkit/closure.hpp"
#include "solvkit/common.hpp"
#include "solvkit/groupring.hpp"
#include "solvkit/lattice.hpp"
#include "solvkit/magnus.hpp"
#include "solvkit/nilq5.hpp"
#include "solvkit/word.hpp"
