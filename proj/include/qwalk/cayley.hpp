#pragma once

#include "kernel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

namespace qwalk {

// Letter 2i is generator i, 2i+1 its inverse.
using Word = std::vector<int>;

inline int inverse_letter(int l) { return l ^ 1; }

inline Word inverse_word(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (int& l : r) l = inverse_letter(l);
  return r;
}

inline Word free_reduce(const Word& w) {
  Word out;
  for (int l : w) {
    if (!out.empty() && out.back() == inverse_letter(l)) out.pop_back();
    else out.push_back(l);
  }
  return out;
}

// Canonical key of a group element: equal keys iff equal elements.
using NormalForm = std::function<std::string(const Word&)>;

struct GroupPresentation {
  std::vector<char> generators;
  std::vector<Word> relators;
  bool abelian = false;
  std::optional<NormalForm> normal_form;  // supplied for the built-in families
  std::string family;                     // built-in family name, empty otherwise

  int rank() const { return static_cast<int>(generators.size()); }
  int letters() const { return 2 * rank(); }
  std::size_t max_relator_length() const {
    std::size_t m = 0;
    for (const auto& r : relators) m = std::max(m, r.size());
    return m;
  }
};

inline std::string word_string(const Word& w, const GroupPresentation& p) {
  std::string s;
  for (int l : w) {
    const char g = p.generators.at(static_cast<std::size_t>(l / 2));
    s += (l % 2) ? static_cast<char>(std::toupper(static_cast<unsigned char>(g))) : g;
  }
  return s.empty() ? "e" : s;
}

// Inverse of word_string: lowercase generators, uppercase inverses, "e" the identity.
inline Word word_from_string(const std::string& s, const GroupPresentation& p) {
  Word w;
  if (s == "e") return w;
  for (char c : s) {
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto it = std::find(p.generators.begin(), p.generators.end(), lower);
    if (it == p.generators.end()) throw InvalidInput(std::string("unknown generator '") + c + "'");
    w.push_back(2 * static_cast<int>(it - p.generators.begin()) + (std::isupper(static_cast<unsigned char>(c)) ? 1 : 0));
  }
  return w;
}

// ---------------------------------------------------------------------------------------------
// Grammar (whitespace ignored):
//   presentation := '<' gens '|' [ word { ',' word } ] '>'
//   gens         := lower { ',' lower }
//   word         := factor { factor }
//   factor       := atom [ "'" ] [ [ '^' ] [ '-' ] digits ]
//   atom         := lower | upper | '(' word ')'
// A lowercase letter is a generator, its uppercase form or a trailing apostrophe the inverse.

namespace detail {

class PresentationParser {
 public:
  explicit PresentationParser(const std::string& text) : s_(text) {}

  GroupPresentation parse() {
    GroupPresentation p;
    expect('<');
    do {
      skip();
      if (pos_ >= s_.size() || !std::islower(static_cast<unsigned char>(s_[pos_])))
        fail("expected a lowercase generator name");
      const char g = s_[pos_];
      for (char h : p.generators)
        if (h == g) fail("duplicate generator name");
      p.generators.push_back(g);
      ++pos_;
      skip();
    } while (accept(','));
    gens_ = &p.generators;
    expect('|');
    skip();
    if (!peek('>')) {
      do {
        const std::size_t start = pos_;
        Word w = free_reduce(word());
        if (w.empty()) fail_at(start, "relator reduces to the empty word");
        p.relators.push_back(std::move(w));
        skip();
      } while (accept(','));
    }
    expect('>');
    skip();
    if (pos_ != s_.size()) fail("trailing characters after the presentation");
    return p;
  }

 private:
  Word word() {
    Word w;
    skip();
    if (pos_ >= s_.size() || s_[pos_] == ',' || s_[pos_] == '>' || s_[pos_] == ')') fail("expected a word");
    while (true) {
      skip();
      if (pos_ >= s_.size() || s_[pos_] == ',' || s_[pos_] == '>' || s_[pos_] == ')') break;
      Word f = factor();
      w.insert(w.end(), f.begin(), f.end());
    }
    return w;
  }

  Word factor() {
    Word a;
    skip();
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      a = word();
      expect(')');
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      int idx = -1;
      for (std::size_t i = 0; i < gens_->size(); ++i)
        if ((*gens_)[i] == lower) idx = static_cast<int>(i);
      if (idx < 0) fail("unknown generator in relator");
      a.push_back(2 * idx + (std::isupper(static_cast<unsigned char>(c)) ? 1 : 0));
      ++pos_;
    } else {
      fail("unexpected character");
    }
    skip();
    while (accept('\'')) {
      a = inverse_word(a);
      skip();
    }
    long e = 1;
    bool caret = accept('^');
    skip();
    bool neg = accept('-');
    skip();
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      e = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        e = e * 10 + (s_[pos_++] - '0');
        if (e > 1000) fail("exponent too large");
      }
    } else if (caret || neg) {
      fail("expected an exponent");
    }
    if (neg) a = inverse_word(a);
    Word out;
    for (long i = 0; i < e; ++i) out.insert(out.end(), a.begin(), a.end());
    return out;
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  [[noreturn]] void fail(const std::string& msg) { fail_at(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) {
    throw ParseError(msg, at);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  const std::vector<char>* gens_ = nullptr;
};

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Normal forms of the built-in families.

// Free reduction.
inline NormalForm free_normal_form() {
  return [](const Word& w) {
    std::string s;
    for (int l : free_reduce(w)) s += std::to_string(l) + ",";
    return s;
  };
}

namespace detail {

// Rows of an integer matrix brought to echelon form by unimodular row operations.
inline std::vector<std::vector<long>> integer_echelon(std::vector<std::vector<long>> rows, std::size_t n) {
  std::vector<std::vector<long>> out;
  for (std::size_t col = 0; col < n; ++col) {
    while (true) {
      // smallest nonzero |entry| in this column among remaining rows
      std::size_t best = rows.size();
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r][col] != 0 && (best == rows.size() || std::abs(rows[r][col]) < std::abs(rows[best][col]))) best = r;
      if (best == rows.size()) break;
      std::swap(rows[best], rows.back());
      auto& piv = rows.back();
      if (piv[col] < 0)
        for (long& x : piv) x = -x;
      bool clean = true;
      for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
        const long q = rows[r][col] / piv[col];
        for (std::size_t c = 0; c < n; ++c) rows[r][c] -= q * piv[c];
        if (rows[r][col] != 0) clean = false;
      }
      if (clean) {
        out.push_back(piv);
        rows.pop_back();
        break;
      }
    }
  }
  return out;
}

inline std::vector<long> abelianize(const Word& w, std::size_t n) {
  std::vector<long> v(n, 0);
  for (int l : w) v[static_cast<std::size_t>(l / 2)] += (l % 2) ? -1 : 1;
  return v;
}

inline long floor_div(long a, long b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0)) ? 1 : 0); }

}  // namespace detail

// Z^n / L with L spanned by the given relation vectors; keys are exponent vectors reduced
// against the echelon form of L.
inline NormalForm abelian_normal_form(std::size_t n, const std::vector<std::vector<long>>& relations) {
  const auto ech = detail::integer_echelon(relations, n);
  return [ech, n](const Word& w) {
    std::vector<long> v = detail::abelianize(w, n);
    for (const auto& row : ech) {
      std::size_t col = 0;
      while (row[col] == 0) ++col;
      const long q = detail::floor_div(v[col], row[col]);
      for (std::size_t c = 0; c < n; ++c) v[c] -= q * row[c];
    }
    std::string s;
    for (long x : v) s += std::to_string(x) + ",";
    return s;
  };
}

// Integer affine maps of Z^2 as 3x3 matrices; word a1 a2 ... evaluates to M(a1) M(a2) ...
using Affine = Eigen::Matrix3i;

struct AffineModel {
  std::vector<Affine> generators;

  Affine eval(const Word& w) const {
    Affine m = Affine::Identity();
    for (int l : w) m = m * letter(l);
    return m;
  }
  Affine letter(int l) const {
    const Affine& g = generators.at(static_cast<std::size_t>(l / 2));
    return (l % 2) ? inverse(g) : g;
  }
  static Affine inverse(const Affine& g) {
    // linear part is orthogonal with integer entries
    Affine r = Affine::Identity();
    const Eigen::Matrix2i lin = g.topLeftCorner<2, 2>();
    const Eigen::Matrix2i inv = lin.transpose();
    r.topLeftCorner<2, 2>() = inv;
    r.topRightCorner<2, 1>() = -inv * g.topRightCorner<2, 1>();
    return r;
  }
  NormalForm normal_form() const {
    const AffineModel self = *this;
    return [self](const Word& w) {
      const Affine m = self.eval(w);
      std::string s;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) s += std::to_string(m(i, j)) + ",";
      return s;
    };
  }
};

inline Affine affine(int a, int b, int tx, int c, int d, int ty) {
  Affine m;
  m << a, b, tx, c, d, ty, 0, 0, 1;
  return m;
}

// p4 realization of <a,b | a^4, b^4, (ab)^2>: quarter turns about (0,0) and (1,0).
inline AffineModel p4_model() { return AffineModel {{affine(0, -1, 0, 1, 0, 0), affine(0, -1, 1, 1, 0, -1)}}; }
// Glide reflections realizing <a,b | a^2 b^-2>.
inline AffineModel klein_model() { return AffineModel {{affine(1, 0, 1, 0, -1, 0), affine(1, 0, 1, 0, -1, 1)}}; }
inline AffineModel z2_model() { return AffineModel {{affine(1, 0, 1, 0, 1, 0), affine(1, 0, 0, 0, 1, 1)}}; }

inline GroupPresentation parse_presentation_raw(const std::string& text) {
  return detail::PresentationParser(text).parse();
}

// w2 is a cyclic rotation of w1 or of its inverse.
inline bool same_relator(const Word& w1, const Word& w2) {
  if (w1.size() != w2.size()) return false;
  for (const Word& base : {w1, inverse_word(w1)})
    for (std::size_t r = 0; r < base.size(); ++r) {
      bool eq = true;
      for (std::size_t i = 0; i < base.size() && eq; ++i) eq = base[(i + r) % base.size()] == w2[i];
      if (eq) return true;
    }
  return false;
}

inline bool is_commutator(const Word& w, int i, int j) {
  return same_relator(w, Word {2 * i, 2 * j, 2 * i + 1, 2 * j + 1});
}

inline bool relator_sets_match(const std::vector<Word>& a, const std::vector<Word>& b) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const Word& w : a) {
    bool found = false;
    for (std::size_t k = 0; k < b.size() && !found; ++k)
      if (!used[k] && same_relator(w, b[k])) used[k] = found = true;
    if (!found) return false;
  }
  return true;
}

// Attaches a normal form when the presentation is one of the certified families: free groups,
// Abelian presentations (all commutators plus any further relators), and the two coset fixtures.
inline void attach_normal_form(GroupPresentation& p) {
  const int n = p.rank();
  if (p.relators.empty()) {
    p.normal_form = free_normal_form();
    p.family = "free";
    return;
  }
  std::vector<bool> is_comm(p.relators.size(), false);
  bool all_pairs = true;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      bool found = false;
      for (std::size_t r = 0; r < p.relators.size(); ++r)
        if (is_commutator(p.relators[r], i, j)) is_comm[r] = found = true;
      all_pairs = all_pairs && found;
    }
  if (all_pairs) {
    std::vector<std::vector<long>> rel;
    for (std::size_t r = 0; r < p.relators.size(); ++r)
      if (!is_comm[r]) rel.push_back(detail::abelianize(p.relators[r], static_cast<std::size_t>(n)));
    p.abelian = true;
    p.normal_form = abelian_normal_form(static_cast<std::size_t>(n), rel);
    p.family = "abelian";
    return;
  }
  if (n == 2) {
    if (relator_sets_match(p.relators, parse_presentation_raw("<a,b|a4,b4,(ab)2>").relators)) {
      p.normal_form = p4_model().normal_form();
      p.family = "p4";
    } else if (relator_sets_match(p.relators, parse_presentation_raw("<a,b|a2b-2>").relators)) {
      p.normal_form = klein_model().normal_form();
      p.family = "klein";
    }
  }
}

inline GroupPresentation parse_presentation(const std::string& text) {
  GroupPresentation p = parse_presentation_raw(text);
  attach_normal_form(p);
  return p;
}

// Built-in presentations by name.
inline GroupPresentation builtin_presentation(const std::string& name) {
  static const std::map<std::string, std::string> table {
      {"z1", "<a|>"},
      {"z2", "<a,b|abAB>"},
      {"z3", "<a,b,c|abAB,acAC,bcBC>"},
      {"bcc", "<a,b,c,d|abAB,acAC,adAD,bcBC,bdBD,cdCD,abcd>"},
      {"free2", "<a,b|>"},
      {"p4", "<a,b|a4,b4,(ab)2>"},
      {"klein", "<a,b|a2b-2>"},
      {"fuchsian", "<a,b|a5,b5,(ab)2>"},
  };
  auto it = table.find(name);
  if (it == table.end()) throw InvalidInput("unknown built-in presentation: " + name);
  return parse_presentation(it->second);
}

// ---------------------------------------------------------------------------------------------
// Balls of the Cayley graph.

struct CayleyBall {
  int radius = 0;
  int letters = 0;
  std::vector<std::string> labels;      // canonical word per vertex
  std::vector<int> distance;            // from the identity (vertex 0)
  std::vector<std::vector<int>> next;   // next[v][letter], -1 if outside the ball or unresolved
  std::vector<bool> complete;           // every letter resolved in the underlying table
  bool identification_complete = false; // certified by a normal form

  std::size_t size() const { return labels.size(); }
  bool interior(std::size_t v) const { return distance[v] <= radius - 1; }

  // (from, generator, to) for each positive generator edge inside the ball.
  std::vector<std::array<int, 3>> edges() const {
    std::vector<std::array<int, 3>> e;
    for (std::size_t v = 0; v < size(); ++v)
      for (int g = 0; 2 * g < letters; ++g) {
        const int w = next[v][static_cast<std::size_t>(2 * g)];
        if (w >= 0) e.push_back({static_cast<int>(v), g, w});
      }
    return e;
  }
};

struct BallOptions {
  int cap = 8;
  bool use_normal_form = true;  // false forces the bounded scanner even for built-ins
};

namespace detail {

// Coset table of the trivial subgroup restricted to words of bounded length: definitions,
// relator scanning with deductions, and coincidence processing.
class BoundedCosetTable {
 public:
  BoundedCosetTable(const GroupPresentation& p, int depth) : p_(p), depth_(depth), nl_(p.letters()) { add(0, {}); }

  void run() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int c = 0; c < static_cast<int>(next_.size()); ++c) {
        if (find(c) != c) continue;
        if (depth_of_[static_cast<std::size_t>(c)] < depth_)
          for (int l = 0; l < nl_; ++l)
            if (get(c, l) < 0) {
              const int d = add(depth_of_[static_cast<std::size_t>(c)] + 1, word_of(c, l));
              set(c, l, d);
              changed = true;
            }
        for (const Word& r : p_.relators) {
          if (find(c) != c) break;
          changed = scan(c, r) || changed;
        }
      }
    }
  }

  int find(int c) {
    while (parent_[static_cast<std::size_t>(c)] != c) {
      parent_[static_cast<std::size_t>(c)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(c)])];
      c = parent_[static_cast<std::size_t>(c)];
    }
    return c;
  }
  int get(int c, int l) {
    const int x = next_[static_cast<std::size_t>(find(c))][static_cast<std::size_t>(l)];
    return x < 0 ? -1 : find(x);
  }
  std::size_t raw_size() const { return next_.size(); }
  const Word& word(int c) const { return words_[static_cast<std::size_t>(c)]; }

 private:
  int add(int depth, Word w) {
    const int id = static_cast<int>(next_.size());
    next_.emplace_back(static_cast<std::size_t>(nl_), -1);
    parent_.push_back(id);
    depth_of_.push_back(depth);
    words_.push_back(std::move(w));
    return id;
  }
  Word word_of(int c, int l) const {
    Word w = words_[static_cast<std::size_t>(c)];
    w.push_back(l);
    return w;
  }
  void set(int c, int l, int d) {
    next_[static_cast<std::size_t>(find(c))][static_cast<std::size_t>(l)] = d;
    next_[static_cast<std::size_t>(find(d))][static_cast<std::size_t>(inverse_letter(l))] = c;
  }

  // Returns true when the table changed.
  bool scan(int c, const Word& r) {
    const std::size_t k = r.size();
    int f = find(c);
    std::size_t i = 0;
    while (i < k) {
      const int x = get(f, r[i]);
      if (x < 0) break;
      f = x;
      ++i;
    }
    if (i == k) return f != find(c) ? coincidence(f, c) : false;
    int b = find(c);
    std::size_t j = k;
    while (j > i) {
      const int x = get(b, inverse_letter(r[j - 1]));
      if (x < 0) break;
      b = x;
      --j;
    }
    if (j == i) return coincidence(f, b);
    if (j == i + 1) {
      set(f, r[i], b);
      return true;
    }
    return false;
  }

  bool coincidence(int a, int b) {
    std::queue<std::pair<int, int>> q;
    q.push({a, b});
    bool merged = false;
    while (!q.empty()) {
      int x = find(q.front().first), y = find(q.front().second);
      q.pop();
      if (x == y) continue;
      if (y < x) std::swap(x, y);
      merged = true;
      parent_[static_cast<std::size_t>(y)] = x;
      auto& dx = depth_of_[static_cast<std::size_t>(x)];
      const auto dy = depth_of_[static_cast<std::size_t>(y)];
      if (dy < dx) {
        dx = dy;
        words_[static_cast<std::size_t>(x)] = words_[static_cast<std::size_t>(y)];
      }
      for (int l = 0; l < nl_; ++l) {
        const int ty = next_[static_cast<std::size_t>(y)][static_cast<std::size_t>(l)];
        if (ty < 0) continue;
        const int tx = next_[static_cast<std::size_t>(x)][static_cast<std::size_t>(l)];
        if (tx < 0) next_[static_cast<std::size_t>(x)][static_cast<std::size_t>(l)] = ty;
        else q.push({tx, ty});
      }
    }
    return merged;
  }

  const GroupPresentation& p_;
  int depth_;
  int nl_;
  std::vector<std::vector<int>> next_;
  std::vector<int> parent_;
  std::vector<int> depth_of_;
  std::vector<Word> words_;
};

}  // namespace detail

// Breadth-first ball; letters are explored in index order so each label is the shortlex-least
// geodesic word of its vertex.
inline CayleyBall build_ball(const GroupPresentation& p, int radius, const BallOptions& opt = {}) {
  if (radius < 0) throw InvalidInput("radius must be non-negative");
  if (radius > opt.cap) throw CapExceeded("ball radius exceeds the cap");
  if (p.rank() == 0) throw InvalidInput("presentation has no generators");
  const int nl = p.letters();
  CayleyBall ball;
  ball.radius = radius;
  ball.letters = nl;

  std::vector<Word> words {Word {}};
  std::vector<std::vector<int>> next;
  std::vector<bool> complete;

  if (p.normal_form && opt.use_normal_form) {
    const NormalForm& nf = *p.normal_form;
    std::map<std::string, int> index {{nf(Word {}), 0}};
    ball.distance = {0};
    next.emplace_back(static_cast<std::size_t>(nl), -1);
    for (std::size_t v = 0; v < words.size(); ++v) {
      if (ball.distance[v] >= radius) continue;
      for (int l = 0; l < nl; ++l) {
        Word w = words[v];
        w.push_back(l);
        const std::string key = nf(w);
        auto [it, fresh] = index.emplace(key, static_cast<int>(words.size()));
        if (fresh) {
          words.push_back(w);
          ball.distance.push_back(ball.distance[v] + 1);
          next.emplace_back(static_cast<std::size_t>(nl), -1);
        }
        next[v][static_cast<std::size_t>(l)] = it->second;
        next[static_cast<std::size_t>(it->second)][static_cast<std::size_t>(inverse_letter(l))] = static_cast<int>(v);
      }
    }
    // boundary edges between already-known vertices
    for (std::size_t v = 0; v < words.size(); ++v)
      for (int l = 0; l < nl; ++l) {
        if (next[v][static_cast<std::size_t>(l)] >= 0) continue;
        Word w = words[v];
        w.push_back(l);
        auto it = index.find(nf(w));
        if (it != index.end()) next[v][static_cast<std::size_t>(l)] = it->second;
      }
    complete.assign(words.size(), true);
    ball.identification_complete = true;
  } else {
    detail::BoundedCosetTable table(p, radius + static_cast<int>(p.max_relator_length()));
    table.run();
    std::map<int, int> index {{table.find(0), 0}};
    std::vector<int> coset {table.find(0)};
    ball.distance = {0};
    next.emplace_back(static_cast<std::size_t>(nl), -1);
    for (std::size_t v = 0; v < coset.size(); ++v) {
      for (int l = 0; l < nl; ++l) {
        const int c = table.get(coset[v], l);
        if (c < 0) continue;
        auto it = index.find(c);
        if (it == index.end()) {
          if (ball.distance[v] >= radius) continue;
          it = index.emplace(c, static_cast<int>(coset.size())).first;
          coset.push_back(c);
          Word w = words[v];
          w.push_back(l);
          words.push_back(w);
          ball.distance.push_back(ball.distance[v] + 1);
          next.emplace_back(static_cast<std::size_t>(nl), -1);
        }
        next[v][static_cast<std::size_t>(l)] = it->second;
      }
    }
    // complete the boundary rows now that every ball vertex is known
    for (std::size_t v = 0; v < coset.size(); ++v) {
      bool all = true;
      for (int l = 0; l < nl; ++l) {
        const int c = table.get(coset[v], l);
        if (c < 0) {
          all = false;
          continue;
        }
        auto it = index.find(c);
        next[v][static_cast<std::size_t>(l)] = it == index.end() ? -1 : it->second;
      }
      complete.push_back(all);
    }
    ball.identification_complete = false;
  }
  for (const Word& w : words) ball.labels.push_back(word_string(w, p));
  ball.next = std::move(next);
  ball.complete = std::move(complete);
  return ball;
}

// Deletes the edge v --g--> v g together with its reverse entry.
inline void remove_edge(CayleyBall& ball, int v, int generator) {
  const int l = 2 * generator;
  if (v < 0 || static_cast<std::size_t>(v) >= ball.size() || l >= ball.letters) throw InvalidInput("no such edge");
  const int w = ball.next[static_cast<std::size_t>(v)][static_cast<std::size_t>(l)];
  if (w < 0) throw InvalidInput("no such edge");
  ball.next[static_cast<std::size_t>(v)][static_cast<std::size_t>(l)] = -1;
  if (ball.next[static_cast<std::size_t>(w)][static_cast<std::size_t>(l + 1)] == v)
    ball.next[static_cast<std::size_t>(w)][static_cast<std::size_t>(l + 1)] = -1;
}

struct HomogeneityReport {
  bool h1 = true;  // vertex sets are group elements: nothing to check on a Cayley ball
  bool h2 = true;  // equal degree
  bool h3 = true;  // equal color structure
  bool h4 = true;  // inverse pairing
  bool h5 = true;  // relator loops close
  std::vector<int> h2_violations;
  std::vector<int> h3_violations;
  std::vector<int> h4_violations;
  std::vector<int> h5_violations;
  std::size_t interior = 0;
  std::size_t loops_checked = 0;
  std::size_t loops_skipped = 0;  // walks that reach the boundary
  bool pass() const { return h1 && h2 && h3 && h4 && h5; }
};

inline HomogeneityReport check_homogeneity(const CayleyBall& ball, const GroupPresentation& p) {
  HomogeneityReport rep;
  const auto n = ball.size();
  std::vector<int> out_deg(n, 0), in_deg(n, 0);
  std::vector<std::vector<int>> out_col(n), in_col(n);
  for (const auto& e : ball.edges()) {
    ++out_deg[static_cast<std::size_t>(e[0])];
    ++in_deg[static_cast<std::size_t>(e[2])];
    out_col[static_cast<std::size_t>(e[0])].push_back(e[1]);
    in_col[static_cast<std::size_t>(e[2])].push_back(e[1]);
  }
  const int ng = ball.letters / 2;
  std::vector<int> all_colors(static_cast<std::size_t>(ng));
  std::iota(all_colors.begin(), all_colors.end(), 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (!ball.interior(v)) continue;
    ++rep.interior;
    const int vi = static_cast<int>(v);
    if (out_deg[v] + in_deg[v] != 2 * ng) rep.h2_violations.push_back(vi);
    auto oc = out_col[v], ic = in_col[v];
    std::sort(oc.begin(), oc.end());
    std::sort(ic.begin(), ic.end());
    if (oc != all_colors || ic != all_colors) rep.h3_violations.push_back(vi);
    bool paired = true;
    for (int l = 0; l < ball.letters; ++l) {
      const int w = ball.next[v][static_cast<std::size_t>(l)];
      if (w < 0 || ball.next[static_cast<std::size_t>(w)][static_cast<std::size_t>(inverse_letter(l))] != vi) paired = false;
    }
    if (!paired) rep.h4_violations.push_back(vi);
    bool loops_ok = true;
    for (const Word& r : p.relators) {
      int cur = vi;
      bool reached = true;
      for (int l : r) {
        cur = ball.next[static_cast<std::size_t>(cur)][static_cast<std::size_t>(l)];
        if (cur < 0) {
          reached = false;
          break;
        }
      }
      if (!reached) {
        ++rep.loops_skipped;
        continue;
      }
      ++rep.loops_checked;
      if (cur != vi) loops_ok = false;
    }
    if (!loops_ok) rep.h5_violations.push_back(vi);
  }
  rep.h2 = rep.h2_violations.empty();
  rep.h3 = rep.h3_violations.empty();
  rep.h4 = rep.h4_violations.empty();
  rep.h5 = rep.h5_violations.empty();
  return rep;
}

inline std::string ball_to_dot(const CayleyBall& ball, const GroupPresentation& p) {
  std::ostringstream os;
  os << "digraph cayley {\n";
  for (std::size_t v = 0; v < ball.size(); ++v) os << "  v" << v << " [label=\"" << ball.labels[v] << "\"];\n";
  for (const auto& e : ball.edges())
    os << "  v" << e[0] << " -> v" << e[2] << " [label=\"" << p.generators[static_cast<std::size_t>(e[1])] << "\"];\n";
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------------------------
// Walks on G and their reduction to the Abelian subgroup.

// psi'(g) = sum_h A_h psi(g h^-1), h a letter or the identity (empty word).
struct GroupKernel {
  int s = 1;
  std::vector<std::pair<Word, Mat>> terms;
};

// Unitarity in the grouping of the action: sum_{h h'^-1 = x} A_h^dag A_h' = delta_{x,e} I and
// sum_{h'^-1 h = x} A_h A_h'^dag = delta_{x,e} I.
inline UnitarityReport check_group_unitarity(const GroupKernel& K, const NormalForm& nf, double tol = 1e-12) {
  std::map<std::string, Mat> left, right;
  const std::string e = nf(Word {});
  for (const auto& [h, a] : K.terms)
    for (const auto& [h2, b] : K.terms) {
      Word x = h;
      const Word hi = inverse_word(h2);
      x.insert(x.end(), hi.begin(), hi.end());
      auto& l = left.try_emplace(nf(x), Mat::Zero(K.s, K.s)).first->second;
      l += a.adjoint() * b;
      Word y = inverse_word(h2);
      y.insert(y.end(), h.begin(), h.end());
      auto& r = right.try_emplace(nf(y), Mat::Zero(K.s, K.s)).first->second;
      r += a * b.adjoint();
    }
  UnitarityReport rep;
  const Mat id = Mat::Identity(K.s, K.s);
  for (auto* m : {&left, &right})
    for (const auto& [key, val] : *m)
      rep.conditions.push_back({key == e ? "identity" : "cross", {}, spectral_norm(key == e ? Mat(val - id) : val)});
  for (const auto& c : rep.conditions) rep.max_residual = std::max(rep.max_residual, c.residual);
  rep.pass = rep.max_residual <= tol;
  return rep;
}

struct CosetStructure {
  AffineModel model;
  std::vector<Word> subgroup_generators;  // words in G's generators, translations in the model
  std::vector<Word> representatives;

  std::size_t index() const { return representatives.size(); }
};

inline CosetStructure p4_cosets() {
  // h_x = a^-1 b, h_y = b a^-1; representatives e, a, a^2, a^3
  return CosetStructure {p4_model(), {{1, 2}, {2, 1}}, {{}, {0}, {0, 0}, {0, 0, 0}}};
}

inline CosetStructure klein_cosets() {
  // h_1 = b a, h_2 = a^2; representatives e, a
  return CosetStructure {klein_model(), {{2, 0}, {0, 0}}, {{}, {0}}};
}

inline CosetStructure z2_cosets() { return CosetStructure {z2_model(), {{0}, {2}}, {{}}}; }

struct CosetFactor {
  std::size_t rep = 0;
  Eigen::Vector2i tau;  // subgroup coordinates
};

// g = tau r with tau in H (coordinates in the subgroup generators) and r a representative.
inline CosetFactor coset_factor(const Affine& g, const CosetStructure& cs) {
  Eigen::Matrix2i basis;
  for (int j = 0; j < 2; ++j) {
    const Affine t = cs.model.eval(cs.subgroup_generators.at(static_cast<std::size_t>(j)));
    if (t.topLeftCorner<2, 2>() != Eigen::Matrix2i::Identity())
      throw InvalidInput("subgroup generator is not a translation in the model");
    basis.col(j) = t.topRightCorner<2, 1>();
  }
  const int det = basis.determinant();
  if (det == 0) throw InvalidInput("subgroup generators are linearly dependent");
  Eigen::Matrix2i adj;
  adj << basis(1, 1), -basis(0, 1), -basis(1, 0), basis(0, 0);
  std::optional<CosetFactor> found;
  for (std::size_t r = 0; r < cs.representatives.size(); ++r) {
    const Affine tau = g * AffineModel::inverse(cs.model.eval(cs.representatives[r]));
    if (tau.topLeftCorner<2, 2>() != Eigen::Matrix2i::Identity()) continue;
    const Eigen::Vector2i num = adj * Eigen::Vector2i(tau.topRightCorner<2, 1>());
    if (num[0] % det != 0 || num[1] % det != 0) continue;
    if (found) throw InvalidInput("coset factorization is not unique: inconsistent coset structure");
    found = CosetFactor {r, num / det};
  }
  if (!found) throw InvalidInput("coset factorization failed: inconsistent coset structure");
  return *found;
}

// Induced kernel on H = Z^2 with s * i_H components: for r h^-1 = tau r', the block
// (r, r') at displacement -n(tau) collects A_h.
inline TransitionKernel coset_reduce(const GroupKernel& K, const CosetStructure& cs) {
  const auto ih = static_cast<Eigen::Index>(cs.index());
  TransitionKernel out;
  out.d = 2;
  out.s = static_cast<int>(K.s * ih);
  for (const auto& [h, a] : K.terms) {
    if (h.size() > 1) throw InvalidInput("group kernel must be supported on generators and the identity");
    for (Eigen::Index r = 0; r < ih; ++r) {
      Word w = cs.representatives[static_cast<std::size_t>(r)];
      const Word hi = inverse_word(h);
      w.insert(w.end(), hi.begin(), hi.end());
      const CosetFactor f = coset_factor(cs.model.eval(w), cs);
      const Displacement delta {-f.tau[0], -f.tau[1]};
      auto it = out.terms.find(delta);
      if (it == out.terms.end()) it = out.terms.emplace(delta, Mat::Zero(out.s, out.s)).first;
      it->second.block(r * K.s, static_cast<Eigen::Index>(f.rep) * K.s, K.s, K.s) += a;
    }
  }
  return out;
}

// sum_delta e^{-i k.delta} B_delta with delta in plain Z^2 coordinates.
inline Mat induced_symbol(const TransitionKernel& K, const Eigen::Vector2d& k) {
  Mat m = Mat::Zero(K.s, K.s);
  for (const auto& [delta, b] : K.terms) m += std::exp(-I_ * (k[0] * delta[0] + k[1] * delta[1])) * b;
  return m;
}

// Bloch matrix from the walk on G itself: apply the walk to psi(tau r) = e^{i k.n(tau)} v_r at
// the group element g = tau0 r and divide out the plane-wave factor at tau0.
inline Mat direct_bloch_matrix(const GroupKernel& K, const CosetStructure& cs, const Eigen::Vector2d& k,
                               const Eigen::Vector2i& tau0 = Eigen::Vector2i::Zero()) {
  const auto ih = static_cast<Eigen::Index>(cs.index());
  const Eigen::Index s = K.s;
  Mat m = Mat::Zero(s * ih, s * ih);
  Affine t0 = Affine::Identity();
  for (int j = 0; j < 2; ++j) {
    const Affine gen = cs.model.eval(cs.subgroup_generators[static_cast<std::size_t>(j)]);
    for (int c = 0; c < std::abs(tau0[j]); ++c) t0 = t0 * (tau0[j] > 0 ? gen : AffineModel::inverse(gen));
  }
  for (Eigen::Index r = 0; r < ih; ++r) {
    const Affine g = t0 * cs.model.eval(cs.representatives[static_cast<std::size_t>(r)]);
    for (const auto& [h, a] : K.terms) {
      const Affine src = g * cs.model.eval(inverse_word(h));
      const CosetFactor f = coset_factor(src, cs);
      const Eigen::Vector2i rel = f.tau - tau0;
      const cplx ph = std::exp(I_ * (k[0] * rel[0] + k[1] * rel[1]));
      m.block(r * s, static_cast<Eigen::Index>(f.rep) * s, s, s) += ph * a;
    }
  }
  return m;
}

}  // namespace qwalk
