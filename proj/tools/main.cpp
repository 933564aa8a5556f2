// Command-line surface over the library: normal forms and equality,
// Fox derivatives, lattice tests, closure analysis, scans, d-extraction.
//
// Exit codes: 0 success / confirmed, 1 semantic negative (NOT-EQUAL,
// VIOLATED, not primitive, no solution, inconsistent), 2 usage or parse
// errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "solvkit/solvkit.hpp"

namespace {

using namespace solvkit;

std::string read_input(const std::string& path) {
  if (path == "-" || path.empty()) {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw solvkit::Error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<Int> parse_vector(const std::string& text) {
  std::vector<Int> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    auto b = cell.find_first_not_of(" \t\r\n");
    auto e = cell.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) throw ParseError("empty vector entry", 0);
    v.emplace_back(cell.substr(b, e - b + 1));
  }
  if (v.empty()) throw ParseError("empty vector", 0);
  return v;
}

std::string matrix_machine(const IntMatrix& m) {
  std::string out;
  for (int i = 0; i < m.rows(); ++i) {
    if (i) out += ';';
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += m.at(i, j).str();
    }
  }
  return out;
}

struct Options {
  int rank = 2;
  int klass = 2;
  bool machine = false;
  int max_length = 4;
  int exponent_cap = 3;
  int trunc_cap = 8;
};

int run(int argc, char** argv) {
  CLI::App app{"solvkit: exact computation in free solvable groups"};
  app.require_subcommand(1);
  Options opt;
  app.add_flag("--machine", opt.machine, "line-oriented key=value output");

  // --- nf ---------------------------------------------------------------
  auto* nf = app.add_subcommand("nf", "normal form of a word; --eq compares two words");
  std::string nf_word, nf_eq;
  nf->add_option("-r", opt.rank, "rank")->capture_default_str();
  nf->add_option("-d", opt.klass, "derived length")->capture_default_str();
  nf->add_option("word", nf_word, "word over z1..zr")->required();
  nf->add_option("--eq", nf_eq, "second word; prints EQUAL or NOT-EQUAL");

  // --- fox --------------------------------------------------------------
  auto* fx = app.add_subcommand("fox", "left Fox derivative of a word");
  std::string fox_word;
  int fox_axis = 1;
  bool fox_abelian_flag = false;
  fx->add_option("-r", opt.rank, "rank")->capture_default_str();
  fx->add_option("-d", opt.klass, "derived length")->capture_default_str();
  fx->add_option("-j", fox_axis, "derivation axis")->capture_default_str();
  fx->add_flag("--abelian", fox_abelian_flag, "project coefficients to Z[Z^r]");
  fx->add_option("word", fox_word, "word over z1..zr")->required();

  // --- omega ------------------------------------------------------------
  auto* om = app.add_subcommand("omega", "Delta-adic valuation of a Laurent element");
  std::string om_expr;
  om->add_option("-r", opt.rank, "rank")->capture_default_str();
  om->add_option("--cap", opt.trunc_cap, "truncation cap")->capture_default_str();
  om->add_option("element", om_expr, "Laurent element, e.g. \"1 - a1\"")->required();

  // --- snf --------------------------------------------------------------
  auto* sn = app.add_subcommand("snf", "Smith normal form of an integer matrix");
  std::string snf_file = "-";
  sn->add_option("file", snf_file, "matrix file (rows of comma-separated integers); - for stdin");

  // --- primitive ----------------------------------------------------------
  auto* pr = app.add_subcommand("primitive", "is an integer vector primitive?");
  std::string pr_vec;
  pr->add_option("vector", pr_vec, "comma-separated integers")->required();

  // --- retract ------------------------------------------------------------
  auto* rt = app.add_subcommand("retract", "cyclic retraction generated by a word");
  std::string rt_word;
  rt->add_option("-r", opt.rank, "rank")->capture_default_str();
  rt->add_option("-d", opt.klass, "derived length")->capture_default_str();
  rt->add_option("word", rt_word, "word over z1..zr")->required();

  // --- analyze ------------------------------------------------------------
  auto* an = app.add_subcommand("analyze", "closure analysis of a subgroup file");
  std::string an_file;
  bool an_search = false;
  an->add_option("-r", opt.rank, "rank")->capture_default_str();
  an->add_option("-d", opt.klass, "derived length")->capture_default_str();
  an->add_option("-L", opt.max_length, "search length bound")->capture_default_str();
  an->add_option("--cap", opt.exponent_cap, "search exponent cap")->capture_default_str();
  an->add_flag("--search", an_search, "attempt certificate upgrades by bounded search");
  an->add_option("file", an_file, "subgroup file, one generator word per line")->required();

  // --- search ---------------------------------------------------------------
  auto* se = app.add_subcommand("search", "bounded search for solutions of split equations");
  std::string se_eqfile, se_subfile;
  se->add_option("-r", opt.rank, "rank")->capture_default_str();
  se->add_option("-d", opt.klass, "derived length")->capture_default_str();
  se->add_option("-L", opt.max_length, "max candidate word length")->capture_default_str();
  se->add_option("--cap", opt.exponent_cap, "exponent cap per syllable")->capture_default_str();
  se->add_option("equations", se_eqfile, "equations file, lines \"lhs = rhs\"")->required();
  se->add_option("subgroup", se_subfile, "subgroup file")->required();

  // --- scan -----------------------------------------------------------------
  auto* sc = app.add_subcommand("scan", "exhaustive quotient scans: lemma7 | eq19");
  std::string sc_kind;
  int sc_bound = 1;
  int sc_index = 2;
  sc->add_option("kind", sc_kind, "lemma7 or eq19")->required()
      ->check(CLI::IsMember({"lemma7", "eq19"}));
  sc->add_option("-B", sc_bound, "exponent bound")->capture_default_str();
  sc->add_option("-r", opt.rank, "rank (eq19)")->capture_default_str();
  sc->add_option("-i", sc_index, "distinguished index (eq19)")->capture_default_str();

  // --- dextract ---------------------------------------------------------------
  auto* dx = app.add_subcommand("dextract", "recover d with c_i = d^(1-a_i) in M_r");
  std::string dx_file;
  dx->add_option("-r", opt.rank, "rank")->capture_default_str();
  dx->add_option("file", dx_file, "file with the words c_1..c_k, one per line")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (nf->parsed()) {
    GroupContext ctx(opt.rank, opt.klass);
    SolvableElement a = embed(parse_word(nf_word, opt.rank), ctx);
    if (nf->count("--eq")) {
      SolvableElement b = embed(parse_word(nf_eq, opt.rank), ctx);
      bool equal = a == b;
      if (opt.machine) {
        std::cout << "equal=" << (equal ? "true" : "false") << "\n";
      } else {
        std::cout << (equal ? "EQUAL" : "NOT-EQUAL") << "\n";
      }
      return equal ? 0 : 1;
    }
    if (opt.machine) {
      std::cout << "normal_form=" << a.serialize() << "\n";
    } else {
      std::cout << a.serialize() << "\n";
    }
    return 0;
  }

  if (fx->parsed()) {
    GroupContext ctx(opt.rank, opt.klass);
    SolvRing d = fox(parse_word(fox_word, opt.rank), fox_axis, ctx);
    std::string text =
        (fox_abelian_flag || opt.klass == 2) ? abelianize_ring(d).str() : d.str();
    std::cout << (opt.machine ? "fox=" : "") << text << "\n";
    return 0;
  }

  if (om->parsed()) {
    OmegaResult o = omega(parse_laurent(om_expr, opt.rank), opt.trunc_cap);
    std::cout << (opt.machine ? "omega=" : "") << o.str() << "\n";
    return 0;
  }

  if (sn->parsed()) {
    SmithDecomposition s = smith_normal_form(parse_matrix(read_input(snf_file)));
    if (opt.machine) {
      std::cout << "D=" << matrix_machine(s.D) << "\n"
                << "U=" << matrix_machine(s.U) << "\n"
                << "V=" << matrix_machine(s.V) << "\n";
    } else {
      std::cout << "D:\n" << format_matrix(s.D) << "U:\n" << format_matrix(s.U)
                << "V:\n" << format_matrix(s.V);
    }
    return 0;
  }

  if (pr->parsed()) {
    bool prim = is_primitive(parse_vector(pr_vec));
    if (opt.machine) {
      std::cout << "primitive=" << (prim ? "true" : "false") << "\n";
    } else {
      std::cout << (prim ? "PRIMITIVE" : "NOT-PRIMITIVE") << "\n";
    }
    return prim ? 0 : 1;
  }

  if (rt->parsed()) {
    GroupContext ctx(opt.rank, opt.klass);
    Word h = parse_word(rt_word, opt.rank);
    auto rho = cyclic_retract(h, ctx);
    if (!rho) {
      std::cout << (opt.machine ? "retract=none\n" : "not primitive\n");
      return 1;
    }
    Subgroup H(ctx, {h});
    bool ok = verify_retraction(*rho, H);
    for (std::size_t i = 0; i < rho->image_words.size(); ++i) {
      if (opt.machine) {
        std::cout << "retraction.z" << i + 1 << "=" << format_word(rho->image_words[i]) << "\n";
      } else {
        std::cout << "retraction: z" << i + 1 << " -> " << format_word(rho->image_words[i])
                  << "\n";
      }
    }
    std::cout << "verified=" << (ok ? "true" : "false") << "\n";
    return ok ? 0 : 1;
  }

  if (an->parsed()) {
    GroupContext ctx(opt.rank, opt.klass);
    Subgroup H = parse_subgroup(read_input(an_file), ctx);
    std::optional<SearchBounds> bounds;
    if (an_search) bounds = SearchBounds{opt.max_length, opt.exponent_cap};
    ClosureReport report = analyze(H, bounds);
    if (opt.machine) {
      std::cout << "rab=" << report.rab << "\n"
                << "rule=" << rule_name(report.rule) << "\n"
                << "verdict=" << verdict_name(report.verdict) << "\n";
      if (report.retraction) {
        for (std::size_t i = 0; i < report.retraction->image_words.size(); ++i) {
          std::cout << "retraction.z" << i + 1 << "="
                    << format_word(report.retraction->image_words[i]) << "\n";
        }
      }
      std::cout << "justification=" << report.justification << "\n";
    } else {
      std::cout << format_report(report);
    }
    return 0;
  }

  if (se->parsed()) {
    GroupContext ctx(opt.rank, opt.klass);
    EquationSystem sys = parse_equations(read_input(se_eqfile), ctx);
    Subgroup H = parse_subgroup(read_input(se_subfile), ctx);
    SearchBounds bounds{opt.max_length, opt.exponent_cap};
    SearchResult res = bounded_search(sys, H, bounds);
    if (!res.found) {
      if (opt.machine) {
        std::cout << "solution=none\n";
      } else {
        std::cout << "none found <= bounds L=" << bounds.max_length
                  << " cap=" << bounds.exponent_cap << "\n";
      }
      return 1;
    }
    for (std::size_t i = 0; i < res.assignment.size(); ++i) {
      if (opt.machine) {
        std::cout << "x" << i + 1 << "=" << format_word(res.assignment[i]) << "\n";
      } else {
        std::cout << "x" << i + 1 << " = " << format_word(res.assignment[i]) << "\n";
      }
    }
    return 0;
  }

  if (sc->parsed()) {
    if (sc_kind == "lemma7") {
      Lemma7Result result = lemma7_scan(sc_bound);
      std::cout << lemma7_report(result, sc_bound);
      return result.confirmed ? 0 : 1;
    }
    Eq19ScanResult scan = scan_eq19(opt.rank, sc_bound, sc_index);
    for (const auto& [k, m] : scan.failures) {
      std::cout << "failure: k=(";
      for (std::size_t t = 0; t < k.size(); ++t) std::cout << (t ? "," : "") << k[t];
      std::cout << ") m=(";
      for (std::size_t t = 0; t < m.size(); ++t) std::cout << (t ? "," : "") << m[t];
      std::cout << ")\n";
    }
    std::cout << "checked=" << scan.checked << " failures=" << scan.failures.size() << "\n";
    std::cout << "EQ19-ORACLE: " << (scan.confirmed() ? "CONFIRMED" : "VIOLATED")
              << " bound=" << sc_bound << " r=" << opt.rank << " i=" << sc_index << "\n";
    return scan.confirmed() ? 0 : 1;
  }

  if (dx->parsed()) {
    GroupContext ctx(opt.rank, 2);
    std::vector<SolvableElement> cs;
    for (const std::string& line : read_effective_lines(read_input(dx_file))) {
      cs.push_back(embed(parse_word(line, opt.rank), ctx));
    }
    if (cs.empty()) throw ParseError("dextract: empty input", 0);
    auto d = d_extraction(cs);
    if (!d) {
      std::cout << (opt.machine ? "d=inconsistent\n" : "inconsistent\n");
      return 1;
    }
    std::cout << (opt.machine ? "d=" : "d = ") << d->serialize() << "\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const solvkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
