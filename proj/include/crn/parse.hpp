#pragma once

#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>

#include "crn/network.hpp"

namespace crn {

/// Parse or validation failure with 1-based source position.
struct ParseError : Error {
  int line;
  int col;
  std::string detail;

  ParseError(int line_, int col_, std::string detail_)
      : Error(std::to_string(line_) + ":" + std::to_string(col_) + ": " + detail_),
        line(line_),
        col(col_),
        detail(std::move(detail_)) {}
};

namespace detail {

// Cursor over one line of a .crn file; positions are 1-based for diagnostics.
struct LineCursor {
  const std::string& text;
  int line;
  size_t pos = 0;

  void skip_space() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool at_end() {
    skip_space();
    return pos >= text.size() || text[pos] == '#';
  }
  int col() const { return static_cast<int>(pos) + 1; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col(), msg); }

  std::string ident() {
    skip_space();
    if (at_end() || !(std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      fail("expected an identifier");
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }
  bool peek_ident() {
    skip_space();
    return pos < text.size() &&
           (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_');
  }
  bool try_symbol(const std::string& sym) {
    skip_space();
    if (text.compare(pos, sym.size(), sym) == 0) {
      pos += sym.size();
      return true;
    }
    return false;
  }
  void expect_symbol(const std::string& sym) {
    if (!try_symbol(sym)) fail("expected '" + sym + "'");
  }
  double number() {
    skip_space();
    if (at_end()) fail("expected a number");
    const int c0 = col();
    size_t start = pos;
    if (text[pos] == '+' || text[pos] == '-') ++pos;
    size_t digits = 0;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
            text[pos] == 'e' || text[pos] == 'E' ||
            ((text[pos] == '+' || text[pos] == '-') &&
             (text[pos - 1] == 'e' || text[pos - 1] == 'E'))))
      ++pos, ++digits;
    if (digits == 0) throw ParseError(line, c0, "expected a number");
    try {
      return std::stod(text.substr(start, pos - start));
    } catch (const std::exception&) {
      throw ParseError(line, c0, "malformed number '" + text.substr(start, pos - start) + "'");
    }
  }
  long integer() {
    skip_space();
    const int c0 = col();
    const double v = number();
    if (v != static_cast<long>(v)) throw ParseError(line, c0, "expected an integer");
    return static_cast<long>(v);
  }
  bool peek_number() {
    skip_space();
    if (pos >= text.size()) return false;
    const char c = text[pos];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+';
  }
};

}  // namespace detail

/// Parses the line-oriented .crn format:
///   species <id>+
///   reaction <complex> -> <complex> @ <rate>
///   reaction <complex> <=> <complex> @ <kf>, <kb>
///   diffusion <id> <rate>
/// where <complex> is `[int] id (+ [int] id)*` with default coefficient 1 and
/// `#` starts a comment. The returned network passes validate_network.
inline Network parse_network(const std::string& text) {
  Network net;
  std::map<std::string, int> species_index;
  std::vector<int> reaction_lines;

  struct PendingComplex {
    std::vector<std::pair<std::string, int>> terms;
    int line, col;
  };
  struct PendingReaction {
    PendingComplex source, target;
    double rate;
    int line;
  };
  std::vector<PendingReaction> pending;
  std::map<std::string, double> diffusion;

  auto parse_complex = [&](detail::LineCursor& cur) {
    PendingComplex cx;
    cur.skip_space();
    cx.line = cur.line;
    cx.col = cur.col();
    while (true) {
      int coeff = 1;
      if (cur.peek_number()) {
        const int c0 = cur.col();
        const long v = cur.integer();
        if (v <= 0) throw ParseError(cur.line, c0, "stoichiometric coefficient must be positive");
        coeff = static_cast<int>(v);
      }
      const int c0 = cur.col();
      const std::string name = cur.ident();
      if (!species_index.count(name)) throw ParseError(cur.line, c0, "unknown species '" + name + "'");
      cx.terms.emplace_back(name, coeff);
      if (!cur.try_symbol("+")) break;
    }
    return cx;
  };

  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    detail::LineCursor cur{raw, line_no};
    if (cur.at_end()) continue;
    const int kw_col = cur.col();
    const std::string keyword = cur.ident();

    if (keyword == "species") {
      if (cur.at_end()) cur.fail("expected at least one species name");
      while (!cur.at_end()) {
        const int c0 = cur.col();
        const std::string name = cur.ident();
        if (species_index.count(name))
          throw ParseError(line_no, c0, "duplicate species '" + name + "'");
        species_index[name] = net.species_count();
        net.species.push_back(name);
      }
    } else if (keyword == "reaction") {
      PendingComplex lhs = parse_complex(cur);
      bool reversible = false;
      if (cur.try_symbol("<=>"))
        reversible = true;
      else
        cur.expect_symbol("->");
      PendingComplex rhs = parse_complex(cur);
      cur.expect_symbol("@");
      const int rate_col = cur.col();
      const double kf = cur.number();
      if (!(kf > 0.0)) throw ParseError(line_no, rate_col, "rate must be positive");
      pending.push_back({lhs, rhs, kf, line_no});
      if (reversible) {
        cur.expect_symbol(",");
        const int back_col = cur.col();
        const double kb = cur.number();
        if (!(kb > 0.0)) throw ParseError(line_no, back_col, "rate must be positive");
        pending.push_back({rhs, lhs, kb, line_no});
      } else if (cur.try_symbol(",")) {
        cur.fail("second rate is only allowed with '<=>'");
      }
      if (!cur.at_end()) cur.fail("trailing input after reaction");
    } else if (keyword == "diffusion") {
      const int c0 = cur.col();
      const std::string name = cur.ident();
      if (!species_index.count(name)) throw ParseError(line_no, c0, "unknown species '" + name + "'");
      const int vcol = cur.col();
      const double d = cur.number();
      if (!(d > 0.0)) throw ParseError(line_no, vcol, "diffusion coefficient must be positive");
      if (diffusion.count(name))
        throw ParseError(line_no, c0, "duplicate diffusion entry for '" + name + "'");
      diffusion[name] = d;
      if (!cur.at_end()) cur.fail("trailing input after diffusion entry");
    } else {
      throw ParseError(line_no, kw_col, "unknown directive '" + keyword + "'");
    }
  }

  const int n = net.species_count();
  for (const auto& pr : pending) {
    Reaction rx;
    rx.source.coeffs = Eigen::VectorXi::Zero(n);
    rx.target.coeffs = Eigen::VectorXi::Zero(n);
    for (const auto& [name, coeff] : pr.source.terms) rx.source.coeffs[species_index[name]] += coeff;
    for (const auto& [name, coeff] : pr.target.terms) rx.target.coeffs[species_index[name]] += coeff;
    rx.rate = pr.rate;
    net.reactions.push_back(std::move(rx));
    reaction_lines.push_back(pr.line);
  }
  net.diffusion = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    auto it = diffusion.find(net.species[i]);
    if (it == diffusion.end())
      throw ParseError(1, 1, "missing diffusion entry for species '" + net.species[i] + "'");
    net.diffusion[i] = it->second;
  }

  const auto violations = validate_network(net);
  if (!violations.empty()) {
    // Attribute the first violation to the offending reaction line when it has one.
    const std::string& msg = violations.front();
    int at_line = 1;
    const std::string marker = " at reaction index ";
    if (auto p = msg.find(marker); p != std::string::npos)
      at_line = reaction_lines[static_cast<size_t>(std::stoi(msg.substr(p + marker.size())))];
    throw ParseError(at_line, 1, msg);
  }
  return net;
}

namespace detail {

inline std::string format_rate(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_complex(const Network& net, const Eigen::VectorXi& y,
                                  const std::vector<int>& order) {
  std::string out;
  for (int i : order) {
    if (y[i] == 0) continue;
    if (!out.empty()) out += " + ";
    if (y[i] != 1) out += std::to_string(y[i]) + " ";
    out += net.species[i];
  }
  return out;
}

}  // namespace detail

/// Canonical text form: species sorted lexicographically, reactions in their
/// stored order, rates printed to full precision. Refuses invalid networks.
inline std::string serialize_network(const Network& net) {
  const auto violations = validate_network(net);
  if (!violations.empty()) throw DomainError("cannot serialize invalid network: " + violations.front());

  std::vector<int> order(net.species_count());
  for (int i = 0; i < net.species_count(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return net.species[a] < net.species[b]; });

  std::string out = "species";
  for (int i : order) out += " " + net.species[i];
  out += "\n";
  for (const auto& rx : net.reactions)
    out += "reaction " + detail::format_complex(net, rx.source.coeffs, order) + " -> " +
           detail::format_complex(net, rx.target.coeffs, order) + " @ " +
           detail::format_rate(rx.rate) + "\n";
  for (int i : order)
    out += "diffusion " + net.species[i] + " " + detail::format_rate(net.diffusion[i]) + "\n";
  return out;
}

/// Structural equality up to species order: same species set, identical
/// reaction multiset under the name correspondence, same rates and diffusion.
inline bool networks_equivalent(const Network& a, const Network& b) {
  if (a.species_count() != b.species_count() || a.reaction_count() != b.reaction_count())
    return false;
  std::vector<int> a_to_b(a.species_count());
  for (int i = 0; i < a.species_count(); ++i) {
    auto it = std::find(b.species.begin(), b.species.end(), a.species[i]);
    if (it == b.species.end()) return false;
    a_to_b[i] = static_cast<int>(it - b.species.begin());
    if (a.diffusion[i] != b.diffusion[a_to_b[i]]) return false;
  }
  auto remap = [&](const Eigen::VectorXi& y) {
    Eigen::VectorXi z = Eigen::VectorXi::Zero(y.size());
    for (int i = 0; i < y.size(); ++i) z[a_to_b[i]] = y[i];
    return z;
  };
  std::vector<bool> used(b.reactions.size(), false);
  for (const auto& rx : a.reactions) {
    bool matched = false;
    for (size_t j = 0; j < b.reactions.size(); ++j) {
      if (used[j]) continue;
      const auto& ry = b.reactions[j];
      if (ry.rate == rx.rate && ry.source.coeffs == remap(rx.source.coeffs) &&
          ry.target.coeffs == remap(rx.target.coeffs)) {
        used[j] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace crn
