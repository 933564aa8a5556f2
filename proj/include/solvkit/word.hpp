#pragma once

// Words over generators z1,z2,... and variables x1,x2,... with integer
// exponents, kept freely reduced.  Commutator brackets expand at parse
// time, [u,v] = u v u^-1 v^-1, nested left-normed: [u,v,w] = [[u,v],w].

#include <algorithm>
#include <cctype>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "solvkit/common.hpp"

namespace solvkit {

enum class SymbolKind { Generator, Variable };

struct Symbol {
  SymbolKind kind;
  int index;  // 1-based

  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

inline Symbol gen(int i) { return {SymbolKind::Generator, i}; }
inline Symbol var(int i) { return {SymbolKind::Variable, i}; }

struct Letter {
  Symbol sym;
  Int exp;  // nonzero in a reduced word

  friend bool operator==(const Letter&, const Letter&) = default;
};

class Word {
 public:
  Word() = default;

  static Word identity() { return Word(); }

  static Word letter(Symbol s, Int e = 1) {
    Word w;
    if (e != 0) w.letters_.push_back({s, std::move(e)});
    return w;
  }

  static Word generator(int i, Int e = 1) { return letter(gen(i), std::move(e)); }
  static Word variable(int i, Int e = 1) { return letter(var(i), std::move(e)); }

  const std::vector<Letter>& letters() const { return letters_; }
  bool is_identity() const { return letters_.empty(); }

  Word inverse() const {
    Word w;
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
      w.letters_.push_back({it->sym, -it->exp});
    }
    return w;
  }

  friend Word operator*(const Word& a, const Word& b) {
    Word w = a;
    for (const Letter& l : b.letters_) w.push(l);
    return w;
  }

  Word pow(const Int& e) const {
    if (e == 0 || is_identity()) return Word();
    if (letters_.size() == 1) {
      return letter(letters_[0].sym, letters_[0].exp * e);
    }
    Int n = e < 0 ? Int(-e) : e;
    if (n * Int(letters_.size()) > 10'000'000) {
      throw Error("word power too large to expand");
    }
    Word base = e < 0 ? inverse() : *this;
    Word acc;
    for (Int i = 0; i < n; ++i) acc = acc * base;
    return acc;
  }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  friend Word free_reduce(const Word&);
  friend class WordParser;

  // Append one letter, merging with the tail and dropping zero exponents.
  void push(Letter l) {
    if (l.exp == 0) return;
    if (!letters_.empty() && letters_.back().sym == l.sym) {
      letters_.back().exp += l.exp;
      if (letters_.back().exp == 0) letters_.pop_back();
      return;
    }
    letters_.push_back(std::move(l));
  }

  std::vector<Letter> letters_;  // invariant: freely reduced
};

// The unique freely reduced word equal to w in the free group.  Words
// built through Word's own operations are already reduced; this is the
// canonicalizer for letter sequences assembled by hand.
inline Word free_reduce(const Word& w) {
  Word out;
  for (const Letter& l : w.letters()) out.push(l);
  return out;
}

inline Word commutator(const Word& u, const Word& v) {
  return u * v * u.inverse() * v.inverse();
}

// Total signed exponent of symbol g in w; the g-coordinate of the
// abelianized image.
inline Int exponent_sum(const Word& w, Symbol g) {
  Int total = 0;
  for (const Letter& l : w.letters()) {
    if (l.sym == g) total += l.exp;
  }
  return total;
}

inline Int exponent_sum(const Word& w, int generator_index) {
  return exponent_sum(w, gen(generator_index));
}

// Abelianized image of w as a vector over generators 1..rank.
inline std::vector<Int> exponent_vector(const Word& w, int rank) {
  std::vector<Int> v(rank, 0);
  for (const Letter& l : w.letters()) {
    if (l.sym.kind != SymbolKind::Generator) {
      throw DomainError("exponent_vector: word contains variables");
    }
    if (l.sym.index < 1 || l.sym.index > rank) {
      throw DomainError("generator index exceeds rank");
    }
    v[l.sym.index - 1] += l.exp;
  }
  return v;
}

inline int max_symbol_index(const Word& w, SymbolKind kind) {
  int m = 0;
  for (const Letter& l : w.letters()) {
    if (l.sym.kind == kind) m = std::max(m, l.sym.index);
  }
  return m;
}

// Replaces every variable occurrence x^e by image(x)^e; generators pass
// through.  Every variable of w must be assigned.
inline Word substitute(const Word& w, const std::map<int, Word>& assignment) {
  Word out;
  for (const Letter& l : w.letters()) {
    if (l.sym.kind == SymbolKind::Variable) {
      auto it = assignment.find(l.sym.index);
      if (it == assignment.end()) {
        throw DomainError("unbound variable x" + std::to_string(l.sym.index));
      }
      out = out * it->second.pow(l.exp);
    } else {
      out = out * Word::letter(l.sym, l.exp);
    }
  }
  return out;
}

inline std::string format_word(const Word& w) {
  if (w.is_identity()) return "1";
  std::string out;
  bool first = true;
  for (const Letter& l : w.letters()) {
    if (!first) out += '*';
    first = false;
    out += l.sym.kind == SymbolKind::Generator ? 'z' : 'x';
    out += std::to_string(l.sym.index);
    if (l.exp != 1) {
      out += '^';
      out += l.exp.str();
    }
  }
  return out;
}

// Recursive-descent parser for the word grammar:
//   word   := "1" | term ("*" term)*
//   term   := atom ("^" int)?
//   atom   := gen | var | "(" word ")" | "[" word ("," word)+ "]"
//   gen    := "z" posint   var := "x" posint
//   int    := "-"? posint
// Whitespace is ignored between tokens.
class WordParser {
 public:
  WordParser(std::string_view text, std::optional<int> rank)
      : text_(text), rank_(rank) {}

  Word parse() {
    Word w = parse_word();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError("unexpected trailing input", pos_);
    }
    return w;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::optional<char> peek() {
    skip_ws();
    if (pos_ >= text_.size()) return std::nullopt;
    return text_[pos_];
  }

  void expect(char c) {
    auto got = peek();
    if (!got || *got != c) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  int parse_posint() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) throw ParseError("expected a positive integer", pos_);
    Int value(std::string(text_.substr(start, pos_ - start)));
    if (value < 1) throw ParseError("expected a positive integer", start);
    if (value > std::numeric_limits<int>::max()) {
      throw ParseError("index too large", start);
    }
    return static_cast<int>(value);
  }

  Int parse_int() {
    skip_ws();
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) throw ParseError("expected an integer", pos_);
    Int value(std::string(text_.substr(start, pos_ - start)));
    if (value < 1) throw ParseError("exponent must be a nonzero integer", start);
    return negative ? Int(-value) : value;
  }

  Word parse_word() {
    auto c = peek();
    if (!c) throw ParseError("expected a word", pos_);
    if (*c == '1') {
      ++pos_;
      return Word::identity();
    }
    Word w = parse_term();
    while (peek() == '*') {
      ++pos_;
      w = w * parse_term();
    }
    return w;
  }

  Word parse_term() {
    Word atom = parse_atom();
    if (peek() == '^') {
      ++pos_;
      return atom.pow(parse_int());
    }
    return atom;
  }

  Word parse_atom() {
    auto c = peek();
    if (!c) throw ParseError("expected a generator, variable, '(' or '['", pos_);
    switch (*c) {
      case 'z': {
        ++pos_;
        std::size_t at = pos_;
        int idx = parse_posint();
        if (rank_ && idx > *rank_) {
          throw ParseError("generator index exceeds rank " + std::to_string(*rank_), at);
        }
        return Word::generator(idx);
      }
      case 'x': {
        ++pos_;
        return Word::variable(parse_posint());
      }
      case '(': {
        ++pos_;
        Word w = parse_word();
        expect(')');
        return w;
      }
      case '[': {
        ++pos_;
        Word w = parse_word();
        expect(',');
        w = commutator(w, parse_word());
        while (peek() == ',') {
          ++pos_;
          w = commutator(w, parse_word());
        }
        expect(']');
        return w;
      }
      default:
        throw ParseError("expected a generator, variable, '(' or '['", pos_);
    }
  }

  std::string_view text_;
  std::optional<int> rank_;
  std::size_t pos_ = 0;
};

inline Word parse_word(std::string_view text, std::optional<int> rank = std::nullopt) {
  return WordParser(text, rank).parse();
}

}  // namespace solvkit
