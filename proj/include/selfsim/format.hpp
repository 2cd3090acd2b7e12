#pragma once

// Line-oriented automaton definition files:
//
//   alphabet: 0 1
//   state a [b 1] perm 0 1      # a = <b, 1>
//   state b [a 1] perm 1 0      # b = <a, 1>sigma
//
// `1` names the identity and is always available. `#` starts a comment.

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selfsim/element.hpp"

namespace selfsim {

struct Automaton {
  std::vector<std::string>       symbols;
  MealyMachine                   machine;
  std::vector<std::string>       names;  // by state index
  std::map<std::string, StateId> index;

  std::size_t degree() const noexcept { return symbols.size(); }
  bool        has(std::string const& name) const { return index.count(name) > 0; }

  StateId state(std::string const& name) const {
    auto it = index.find(name);
    if (it == index.end()) {
      throw Error("unknown state '" + name + "'");
    }
    return it->second;
  }

  Element element(std::string const& name) const {
    return canonicalize(machine, state(name));
  }

  // Declared states in file order, excluding the implicit identity.
  std::vector<std::string> declared() const {
    std::vector<std::string> out;
    for (auto const& n : names) {
      if (n != "1") {
        out.push_back(n);
      }
    }
    return out;
  }

  Letter letter(std::string const& sym) const {
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (symbols[i] == sym) {
        return static_cast<Letter>(i);
      }
    }
    throw Error("unknown letter '" + sym + "'");
  }

  // Words may be written as space-separated symbols or, when every symbol is
  // a single character, as one run of characters ("0110").
  Word parse_word(std::string const& text) const {
    std::istringstream in(text);
    std::vector<std::string> toks;
    for (std::string t; in >> t;) {
      toks.push_back(t);
    }
    bool single = true;
    for (auto const& s : symbols) {
      single = single && s.size() == 1;
    }
    Word w;
    if (toks.size() == 1 && single && toks[0].size() > 1) {
      for (char c : toks[0]) {
        w.push_back(letter(std::string(1, c)));
      }
      return w;
    }
    for (auto const& t : toks) {
      w.push_back(letter(t));
    }
    return w;
  }

  std::string format_word(Word const& w) const {
    bool single = true;
    for (auto const& s : symbols) {
      single = single && s.size() == 1;
    }
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!single && i > 0) {
        out += ' ';
      }
      out += symbols.at(w[i]);
    }
    return out;
  }
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) {
      ++j;
    }
    if (j > i) {
      out.emplace_back(s.substr(i, j - i));
    }
    i = j;
  }
  return out;
}

}  // namespace detail

inline Automaton parse_machine(std::string const& text) {
  struct Row {
    int                      line;
    std::string              name;
    std::vector<std::string> sections;
    std::vector<Letter>      perm;
  };
  Automaton        out;
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string        raw;
  int                lineno = 0;
  bool               have_alphabet = false;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    auto toks = detail::split_ws(raw);
    if (toks.empty()) {
      continue;
    }
    if (toks[0] == "alphabet:" || toks[0].rfind("alphabet:", 0) == 0) {
      if (have_alphabet) {
        throw ParseError(lineno, "duplicate alphabet header");
      }
      std::string rest = raw.substr(raw.find("alphabet:") + 9);
      out.symbols      = detail::split_ws(rest);
      if (out.symbols.size() < 2) {
        throw ParseError(lineno, "alphabet needs at least two letters");
      }
      std::set<std::string> uniq(out.symbols.begin(), out.symbols.end());
      if (uniq.size() != out.symbols.size()) {
        throw ParseError(lineno, "repeated letter in alphabet");
      }
      have_alphabet = true;
      continue;
    }
    if (toks[0] != "state") {
      throw ParseError(lineno, "expected 'alphabet:' or 'state', got '" + toks[0] + "'");
    }
    if (!have_alphabet) {
      throw ParseError(lineno, "state declared before alphabet header");
    }
    auto open  = raw.find('[');
    auto close = raw.find(']');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      throw ParseError(lineno, "expected '[sections]'");
    }
    auto head = detail::split_ws(std::string_view(raw).substr(0, open));
    if (head.size() != 2) {
      throw ParseError(lineno, "expected 'state <name> [...]'");
    }
    Row row{lineno, head[1], {}, {}};
    row.sections = detail::split_ws(std::string_view(raw).substr(open + 1, close - open - 1));
    if (row.sections.size() != out.symbols.size()) {
      throw ParseError(lineno, "expected " + std::to_string(out.symbols.size())
                                   + " sections, got "
                                   + std::to_string(row.sections.size()));
    }
    auto tail = detail::split_ws(std::string_view(raw).substr(close + 1));
    if (tail.empty() || tail[0] != "perm") {
      throw ParseError(lineno, "expected 'perm' after sections");
    }
    if (tail.size() != out.symbols.size() + 1) {
      throw ParseError(lineno, "perm needs one image per letter");
    }
    for (std::size_t i = 1; i < tail.size(); ++i) {
      auto it = std::find(out.symbols.begin(), out.symbols.end(), tail[i]);
      if (it == out.symbols.end()) {
        throw ParseError(lineno, "unknown letter '" + tail[i] + "'");
      }
      row.perm.push_back(static_cast<Letter>(it - out.symbols.begin()));
    }
    {
      std::vector<bool> seen(out.symbols.size(), false);
      for (Letter y : row.perm) {
        if (seen[y]) {
          throw ParseError(lineno, "output row of '" + row.name + "' is not a permutation");
        }
        seen[y] = true;
      }
    }
    rows.push_back(std::move(row));
  }
  if (!have_alphabet) {
    throw ParseError(lineno, "missing alphabet header");
  }

  std::size_t const d = out.symbols.size();
  out.machine         = MealyMachine(d);
  out.names.push_back("1");
  out.index["1"] = 0;
  for (auto const& r : rows) {
    if (r.name == "1") {
      bool ok = std::all_of(r.sections.begin(), r.sections.end(),
                            [](auto const& s) { return s == "1"; });
      for (std::size_t x = 0; x < d; ++x) {
        ok = ok && r.perm[x] == x;
      }
      if (!ok) {
        throw ParseError(r.line, "state '1' is reserved for the identity");
      }
      continue;
    }
    if (out.index.count(r.name) != 0) {
      throw ParseError(r.line, "state '" + r.name + "' declared twice");
    }
    out.index[r.name] = static_cast<StateId>(out.names.size());
    out.names.push_back(r.name);
  }
  out.machine.add_state(Perm::identity(d), std::vector<StateId>(d, 0));
  for (auto const& r : rows) {
    if (r.name == "1") {
      continue;
    }
    std::vector<StateId> next(d);
    for (std::size_t x = 0; x < d; ++x) {
      auto it = out.index.find(r.sections[x]);
      if (it == out.index.end()) {
        throw ParseError(r.line, "undeclared state '" + r.sections[x] + "'");
      }
      next[x] = it->second;
    }
    out.machine.add_state(Perm(r.perm), std::move(next));
  }
  return out;
}

// Symbols 0..d-1 as decimal strings.
inline std::vector<std::string> default_symbols(std::size_t degree) {
  std::vector<std::string> s;
  for (std::size_t i = 0; i < degree; ++i) {
    s.push_back(std::to_string(i));
  }
  return s;
}

// Symbols for X^k: concatenations of base symbols, most significant first.
inline std::vector<std::string> power_symbols(std::vector<std::string> const& base,
                                              std::size_t                     k) {
  std::vector<std::string> cur{""};
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::string> nxt;
    for (auto const& p : cur) {
      for (auto const& s : base) {
        nxt.push_back(p + s);
      }
    }
    cur.swap(nxt);
  }
  return cur;
}

// Writes named elements (all over the same alphabet) together with every
// state they reach. Unnamed intermediate states are called s0, s1, ...
inline std::string
write_machine(std::vector<std::string> const&                      symbols,
              std::vector<std::pair<std::string, Element>> const& named,
              std::string const&                                   comment = {}) {
  std::ostringstream os;
  if (!comment.empty()) {
    std::istringstream in(comment);
    for (std::string l; std::getline(in, l);) {
      os << "# " << l << '\n';
    }
  }
  os << "alphabet:";
  for (auto const& s : symbols) {
    os << ' ' << s;
  }
  os << '\n';
  if (named.empty()) {
    return os.str();
  }
  std::vector<Element> roots;
  for (auto const& [n, e] : named) {
    if (e.degree() != symbols.size()) {
      throw AlphabetMismatch(symbols.size(), e.degree());
    }
    roots.push_back(e);
  }
  std::vector<Element> states;
  machine_of(roots, nullptr, &states);

  std::set<std::string> taken;
  for (auto const& [n, e] : named) {
    taken.insert(n);
  }
  std::unordered_map<ElementId, std::string> label;
  Element const one = identity(symbols.size());
  label[one.id()]   = "1";
  for (auto const& [n, e] : named) {
    if (n != "1") {
      label.try_emplace(e.id(), n);
    }
  }
  std::size_t counter = 0;
  for (Element s : states) {
    if (label.count(s.id()) == 0) {
      std::string nm;
      do {
        nm = "s" + std::to_string(counter++);
      } while (taken.count(nm) != 0);
      label[s.id()] = nm;
    }
  }
  auto line = [&](std::string const& name, Element e) {
    os << "state " << name << " [";
    for (std::size_t x = 0; x < symbols.size(); ++x) {
      os << (x ? " " : "") << label.at(e.section(static_cast<Letter>(x)).id());
    }
    os << "] perm";
    for (Letter y : e.root_perm().images()) {
      os << ' ' << symbols[y];
    }
    os << '\n';
  };
  std::set<std::string> written{"1"};
  for (auto const& [n, e] : named) {
    if (written.insert(n).second) {
      line(n, e);
    }
  }
  for (Element s : states) {
    auto const& nm = label.at(s.id());
    if (written.insert(nm).second) {
      line(nm, s);
    }
  }
  return os.str();
}

}  // namespace selfsim
