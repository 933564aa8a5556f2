#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <random>

#include "solvkit/magnus.hpp"

using namespace solvkit;

namespace {

Word random_word(std::mt19937_64& rng, int rank, int len) {
  std::uniform_int_distribution<int> pick_gen(1, rank);
  std::uniform_int_distribution<int> pick_exp(-2, 2);
  Word w;
  for (int i = 0; i < len; ++i) {
    int e = pick_exp(rng);
    if (e == 0) e = 1;
    w = w * Word::generator(pick_gen(rng), e);
  }
  return w;
}

LaurentElement L(const std::string& text, int rank = 2) { return parse_laurent(text, rank); }

}  // namespace

TEST_CASE("context guard") {
  CHECK_THROWS_AS(GroupContext(0, 1), DomainError);
  CHECK_THROWS_AS(GroupContext(2, 0), DomainError);
  CHECK_THROWS_AS(GroupContext(2, 5), DomainError);
  setenv("SOLVKIT_MAX_CLASS", "5", 1);
  CHECK_NOTHROW(GroupContext(2, 5));
  unsetenv("SOLVKIT_MAX_CLASS");
  CHECK_THROWS_AS(GroupContext(2, 5), DomainError);
}

TEST_CASE("embed of a generator in the metabelian group") {
  GroupContext ctx(2, 2);
  SolvableElement z1 = embed(parse_word("z1"), ctx);
  CHECK(z1.top().exps() == std::vector<Int>{1, 0});
  CHECK(abelianize_ring(z1.coords()[0]) == L("1"));
  CHECK(abelianize_ring(z1.coords()[1]) == L("0"));
  CHECK(z1.serialize() == "d2:d1:(1,0)|[1*d1:(0,0);0]");
}

TEST_CASE("embed of the basic commutator") {
  GroupContext ctx(2, 2);
  SolvableElement c = embed(parse_word("[z1,z2]"), ctx);
  CHECK(c.top().is_identity());
  CHECK(abelianize_ring(c.coords()[0]) == L("1 - a2"));
  CHECK(abelianize_ring(c.coords()[1]) == L("a1 - 1"));
  // fundamental identity: (1-a2)(a1-1) + (a1-1)(a2-1) == 0
  CHECK((L("1 - a2") * L("a1 - 1") + L("a1 - 1") * L("a2 - 1")).is_zero());
  CHECK(c.fundamental_identity_holds());
}

TEST_CASE("embed of w * w^-1 is the identity") {
  GroupContext ctx(2, 2);
  Word w = parse_word("[z1,z2]*z1^2*z2^-1");
  CHECK(embed(w * w.inverse(), ctx).is_identity());
}

TEST_CASE("group operations") {
  GroupContext ctx(2, 2);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    SolvableElement a = embed(random_word(rng, 2, 5), ctx);
    CHECK(a.mul(a.inverse()).is_identity());
  }
  // metabelian identity [G', G'] = 1
  CHECK(embed(parse_word("[[z1,z2],[z1*z2,z2*z1]]"), ctx).is_identity());
  CHECK_FALSE(embed(parse_word("[z1,z2]"), ctx).is_identity());
  // the same law fails one class up
  GroupContext ctx3(2, 3);
  CHECK_FALSE(embed(parse_word("[[z1,z2],[z1*z2,z2*z1]]"), ctx3).is_identity());
}

TEST_CASE("group axioms and normal-form invariants on random elements") {
  std::mt19937_64 rng(42);
  for (int d = 2; d <= 3; ++d) {
    GroupContext ctx(2, d);
    for (int trial = 0; trial < 8; ++trial) {
      SolvableElement a = embed(random_word(rng, 2, 4), ctx);
      SolvableElement b = embed(random_word(rng, 2, 4), ctx);
      SolvableElement c = embed(random_word(rng, 2, 4), ctx);
      CHECK(a.mul(b).mul(c) == a.mul(b.mul(c)));
      CHECK(a.mul(a.inverse()).is_identity());
      CHECK(a.mul(b).fundamental_identity_holds());
      CHECK(a.inverse().fundamental_identity_holds());
    }
  }
}

TEST_CASE("embed is a homomorphism") {
  std::mt19937_64 rng(43);
  GroupContext ctx(3, 2);
  for (int trial = 0; trial < 10; ++trial) {
    Word u = random_word(rng, 3, 4);
    Word v = random_word(rng, 3, 4);
    CHECK(embed(u * v, ctx) == embed(u, ctx).mul(embed(v, ctx)));
    CHECK(embed(u.inverse(), ctx) == embed(u, ctx).inverse());
    CHECK(embed(u, ctx).pow(3) == embed(u.pow(3), ctx));
  }
}

TEST_CASE("fox derivatives") {
  GroupContext ctx(2, 2);
  CHECK(abelianize_ring(fox(parse_word("z1*z2"), 1, ctx)) == L("1"));
  CHECK(fox_abelian(parse_word("[z1,z2]"), 1, ctx) == L("1 - a2"));
  SolvRing d1 = fox(parse_word("z1^2"), 1, ctx);
  CHECK(abelianize_ring(d1) == L("1 + a1"));
  CHECK(d1.augmentation() == 2);
  CHECK_THROWS_AS(fox(parse_word("z1"), 1, GroupContext(2, 1)), DomainError);
}

TEST_CASE("augmentation of the Fox derivative is the exponent sum") {
  std::mt19937_64 rng(44);
  for (int d = 2; d <= 3; ++d) {
    GroupContext ctx(2, d);
    for (int trial = 0; trial < 10; ++trial) {
      Word w = random_word(rng, 2, 5);
      SolvableElement e = embed(w, ctx);
      for (int j = 1; j <= 2; ++j) {
        CHECK(e.coords()[j - 1].augmentation() == exponent_sum(w, j));
      }
    }
  }
}

TEST_CASE("fundamental identity on random words") {
  std::mt19937_64 rng(45);
  for (int r = 2; r <= 3; ++r) {
    for (int d = 2; d <= 3; ++d) {
      GroupContext ctx(r, d);
      for (int trial = 0; trial < 10; ++trial) {
        CHECK(embed(random_word(rng, r, 6), ctx).fundamental_identity_holds());
      }
    }
  }
}

TEST_CASE("chain rule") {
  GroupContext ctx(2, 2);
  std::mt19937_64 rng(46);
  // c = z1: both sides are the first derivative of h_1
  SolvableElement h1 = embed(random_word(rng, 2, 4), ctx);
  SolvableElement h2 = embed(random_word(rng, 2, 4), ctx);
  CHECK(chain_rule_check(parse_word("z1"), {h1, h2}));
  CHECK(chain_rule_check(parse_word("[z1,z2]"),
                         {embed(parse_word("z2"), ctx), embed(parse_word("z1"), ctx)}));
  for (int trial = 0; trial < 50; ++trial) {
    Word c = random_word(rng, 2, 6);
    SolvableElement a = embed(random_word(rng, 2, 5), ctx);
    SolvableElement b = embed(random_word(rng, 2, 5), ctx);
    CHECK(chain_rule_check(c, {a, b}));
  }
  CHECK_THROWS_AS(chain_rule_check(parse_word("z3"), {h1, h2}), DomainError);
}

TEST_CASE("derived_depth") {
  GroupContext ctx3(2, 3);
  CHECK(derived_depth(embed(parse_word("z1"), ctx3)) == 0);
  CHECK(derived_depth(embed(parse_word("[z1,z2]"), ctx3)) == 1);
  CHECK(derived_depth(embed(parse_word("[[z1,z2],[z1^2,z2]]"), ctx3)) == 2);
  // [z1, z2*z1] freely reduces to [z1,z2], so this bracket is trivial
  CHECK_FALSE(derived_depth(embed(parse_word("[[z1,z2],[z1,z2*z1]]"), ctx3)).has_value());
  CHECK_FALSE(derived_depth(embed(parse_word("1"), ctx3)).has_value());
}

TEST_CASE("module_power") {
  GroupContext ctx(2, 2);
  SolvableElement c = embed(parse_word("[z1,z2]"), ctx);
  SolvKeyGroup g = c.ring_group();

  CHECK(module_power(c, SolvRing::one(g)) == c);

  // c^{a1} is the conjugate z1 c z1^-1
  SolvableElement z1 = embed(parse_word("z1"), ctx);
  SolvRing a1 = SolvRing::monomial(
      g, SolvableElement::make_key(SolvableElement::generator(GroupContext(2, 1), 1)));
  CHECK(module_power(c, a1) == z1.mul(c).mul(z1.inverse()));

  // c^{1-a1} agrees with the composite c * (c^{a1})^-1 and multiplies the
  // coordinates
  SolvRing one_minus_a1 = SolvRing::one(g) - a1;
  SolvableElement lhs = module_power(c, one_minus_a1);
  CHECK(lhs == c.mul(z1.mul(c).mul(z1.inverse()).inverse()));
  for (int j = 0; j < 2; ++j) {
    CHECK(abelianize_ring(lhs.coords()[j]) ==
          abelianize_ring(one_minus_a1) * abelianize_ring(c.coords()[j]));
  }
  CHECK_THROWS_AS(module_power(z1, a1), DomainError);
}

TEST_CASE("module torsion freeness") {
  GroupContext ctx(2, 2);
  std::mt19937_64 rng(47);
  SolvKeyGroup g{2, 1};
  int done = 0;
  while (done < 15) {
    Word u = random_word(rng, 2, 3);
    Word v = random_word(rng, 2, 3);
    SolvableElement c = embed(commutator(u, v), ctx);
    if (c.is_identity()) continue;
    std::uniform_int_distribution<int> pick(-2, 2);
    LaurentElement alpha = laurent_zero(2);
    for (int t = 0; t < 3; ++t) {
      alpha.add_term({Int(pick(rng)), Int(pick(rng))}, pick(rng));
    }
    if (alpha.is_zero()) continue;
    ++done;
    CHECK_FALSE(module_power(c, laurent_to_ring(alpha, g)).is_identity());
  }
}

TEST_CASE("evaluate") {
  GroupContext ctx(2, 2);
  SolvableElement h1 = embed(parse_word("z1*z2"), ctx);
  CHECK(evaluate(parse_word("x1*x1^-1"), {h1}).is_identity());
  CHECK(evaluate(parse_word("[x1,x2,x2,x1]"),
                 {embed(parse_word("z1"), ctx), embed(parse_word("z2"), ctx)}) ==
        embed(parse_word("[z1,z2,z2,z1]"), ctx));
  CHECK(evaluate(parse_word("x1^2"), {h1}) == embed(parse_word("z1*z2*z1*z2"), ctx));
  CHECK_THROWS_AS(evaluate(parse_word("x2"), {h1}), DomainError);
}

TEST_CASE("metabelian permutation identity") {
  std::mt19937_64 rng(48);
  GroupContext ctx(2, 2);
  // [x1,x2,x3,...,xn] is invariant under permutations of positions 3..n
  auto commutator_word = [](const std::vector<int>& order) {
    Word w = commutator(Word::variable(order[0]), Word::variable(order[1]));
    for (std::size_t p = 2; p < order.size(); ++p) w = commutator(w, Word::variable(order[p]));
    return w;
  };
  for (int n = 4; n <= 5; ++n) {
    std::vector<SolvableElement> h;
    for (int i = 0; i < n; ++i) h.push_back(embed(random_word(rng, 2, 3), ctx));
    std::vector<int> base(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) base[static_cast<std::size_t>(i)] = i + 1;
    SolvableElement reference = evaluate(commutator_word(base), h);
    std::vector<int> tail(base.begin() + 2, base.end());
    std::sort(tail.begin(), tail.end());
    do {
      std::vector<int> order{base[0], base[1]};
      order.insert(order.end(), tail.begin(), tail.end());
      CHECK(evaluate(commutator_word(order), h) == reference);
    } while (std::next_permutation(tail.begin(), tail.end()));
  }
}

TEST_CASE("module_rank") {
  GroupContext ctx2(2, 2);
  CHECK(module_rank({embed(parse_word("[z1,z2]"), ctx2)}) == 1);
  CHECK(module_rank({embed(parse_word("[z1,z2]"), ctx2),
                     embed(parse_word("[z1,z2]^2"), ctx2)}) == 1);
  GroupContext ctx3(3, 2);
  CHECK(module_rank({embed(parse_word("[z1,z2]"), ctx3), embed(parse_word("[z1,z3]"), ctx3),
                     embed(parse_word("[z2,z3]"), ctx3)}) == 2);
  CHECK_THROWS_AS(module_rank({embed(parse_word("z1"), ctx2)}), DomainError);
}

TEST_CASE("serialization is canonical and distinguishes elements") {
  GroupContext ctx(2, 3);
  std::mt19937_64 rng(49);
  for (int trial = 0; trial < 10; ++trial) {
    Word u = random_word(rng, 2, 4);
    Word v = random_word(rng, 2, 4);
    SolvableElement a = embed(u, ctx);
    SolvableElement b = embed(v, ctx);
    CHECK((a == b) == (a.serialize() == b.serialize()));
  }
}
