#pragma once

// Text formats and the command-line front end: function tables, set and
// direction literals, certificate documents and subcommand dispatch.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "affine/bh_sets.hpp"
#include "affine/errors.hpp"
#include "affine/multiaffine.hpp"
#include "affine/recovery.hpp"
#include "affine/ring.hpp"
#include "affine/sharpness.hpp"
#include "affine/vonstaudt.hpp"
#include "json.hpp"

namespace affine {

inline constexpr std::string_view kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Function tables.

using ParsedFunction = std::variant<FunctionOracle<ZMod>, FunctionOracle<GaloisField>, FunctionOracle<Rationals>,
                                    VectorMapTable<ZMod>, VectorMapTable<GaloisField>>;

namespace detail {

struct SourceLine {
  int number = 0;
  std::vector<std::string> tokens;
};

inline std::vector<SourceLine> tokenize_lines(std::string_view text) {
  std::vector<SourceLine> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++number;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = split_ws(line);
    if (!tokens.empty()) out.push_back({number, std::move(tokens)});
    pos = end + 1;
  }
  return out;
}

template <Ring R>
Elem<R> parse_at(const R& ring, const std::string& token, int line) {
  try {
    return ring.parse(token);
  } catch (const ParseError& e) {
    throw ParseError(line, e.what());
  }
}

inline int parse_int_at(const std::string& token, int line, std::string_view what) {
  auto v = parse_u64(token);
  if (!v || *v > 1'000'000) throw ParseError(line, "bad " + std::string(what) + " '" + token + "'");
  return static_cast<int>(*v);
}

template <Ring R>
MultiAffinePoly<R> parse_poly_body(const R& ring, int arity, const std::vector<SourceLine>& lines, std::size_t from) {
  MultiAffinePoly<R> p(ring, arity);
  std::set<Mask> seen;
  for (std::size_t i = from; i < lines.size(); ++i) {
    const auto& [number, tok] = lines[i];
    if (tok[0] != "term") throw ParseError(number, "expected 'term', got '" + tok[0] + "'");
    if (tok.size() < 2) throw ParseError(number, "term needs a coefficient");
    const Elem<R> c = parse_at(ring, tok[1], number);
    std::vector<int> idx;
    for (std::size_t t = 2; t < tok.size(); ++t) {
      const int j = parse_int_at(tok[t], number, "variable index");
      if (j < 1 || j > arity) throw ParseError(number, "variable index " + tok[t] + " outside 1.." + std::to_string(arity));
      if (std::find(idx.begin(), idx.end(), j) != idx.end()) throw ParseError(number, "repeated variable " + tok[t]);
      idx.push_back(j);
    }
    const Mask m = mask_from_indices(idx, arity);
    if (!seen.insert(m).second) throw ParseError(number, "duplicate term " + mask_to_string(m));
    p.set(m, c);
  }
  return p;
}

template <FiniteRing R>
std::vector<Elem<R>> parse_map_body(const R& ring, int arity, int width, const std::vector<SourceLine>& lines,
                                    std::size_t from) {
  const std::uint64_t size = table_size(ring, arity);
  std::vector<Elem<R>> values(size * static_cast<std::uint64_t>(width), ring.zero());
  std::vector<int> defined_at(size, 0);
  const std::size_t expected = static_cast<std::size_t>(1 + arity + 1 + width);
  for (std::size_t i = from; i < lines.size(); ++i) {
    const auto& [number, tok] = lines[i];
    if (tok[0] != "map") throw ParseError(number, "expected 'map', got '" + tok[0] + "'");
    if (tok.size() != expected || tok[1 + arity] != "->") {
      throw ParseError(number, "map row needs " + std::to_string(arity) + " coordinates, '->', and " +
                                   std::to_string(width) + " value(s)");
    }
    Point<R> x;
    for (int j = 0; j < arity; ++j) x.push_back(parse_at(ring, tok[1 + j], number));
    const std::uint64_t idx = point_index(ring, x);
    if (defined_at[idx] != 0) {
      throw ParseError(number, "duplicate point (" + point_to_string(ring, x) + "), first given on line " +
                                   std::to_string(defined_at[idx]));
    }
    defined_at[idx] = number;
    for (int c = 0; c < width; ++c) values[idx * width + c] = parse_at(ring, tok[2 + arity + c], number);
  }
  for (std::uint64_t idx = 0; idx < size; ++idx) {
    if (defined_at[idx] == 0) {
      throw ParseError(0, "missing point (" + point_to_string(ring, point_from_index(ring, arity, idx)) + ")");
    }
  }
  return values;
}

}  // namespace detail

/// Parses the line-oriented table format:
///   ring <literal> / arity <n> / [codomain scalar|vector <e>]
/// followed by exhaustive `map x.. -> v..` rows or by `poly` and `term c i..`.
inline ParsedFunction parse_function_table(std::string_view text) {
  const auto lines = detail::tokenize_lines(text);
  std::optional<AnyRing> ring;
  std::optional<int> arity;
  int width = 0;  // 0: scalar codomain
  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const auto& [number, tok] = lines[i];
    if (tok[0] == "ring") {
      if (ring) throw ParseError(number, "ring given twice");
      try {
        ring = parse_ring(std::vector<std::string>(tok.begin() + 1, tok.end()));
      } catch (const ParseError& e) {
        throw ParseError(number, e.what());
      }
    } else if (tok[0] == "arity") {
      if (tok.size() != 2) throw ParseError(number, "arity takes one integer");
      arity = detail::parse_int_at(tok[1], number, "arity");
      if (*arity < 1 || *arity > kMaxArity) throw ParseError(number, "arity must be in 1..16");
    } else if (tok[0] == "codomain") {
      if (tok.size() == 2 && tok[1] == "scalar") {
        width = 0;
      } else if (tok.size() == 3 && tok[1] == "vector") {
        width = detail::parse_int_at(tok[2], number, "codomain dimension");
        if (width < 1) throw ParseError(number, "codomain dimension must be >= 1");
      } else {
        throw ParseError(number, "codomain is 'scalar' or 'vector <e>'");
      }
    } else {
      break;
    }
  }
  const int body_line = i < lines.size() ? lines[i].number : 0;
  if (!ring) throw ParseError(body_line, "missing 'ring' header");
  if (!arity) throw ParseError(body_line, "missing 'arity' header");
  const bool poly_body = i < lines.size() && lines[i].tokens[0] == "poly";
  if (poly_body && lines[i].tokens.size() != 1) throw ParseError(body_line, "'poly' takes no arguments");

  return std::visit(
      [&](const auto& r) -> ParsedFunction {
        using R = std::decay_t<decltype(r)>;
        if (poly_body) {
          if (width != 0) throw ParseError(body_line, "vector codomains need map rows");
          return FunctionOracle<R>::from_poly(detail::parse_poly_body(r, *arity, lines, i + 1));
        }
        if constexpr (FiniteRing<R>) {
          if (width == 0) return FunctionOracle<R>::from_table(r, *arity, detail::parse_map_body(r, *arity, 1, lines, i));
          return VectorMapTable<R>(r, *arity, width, detail::parse_map_body(r, *arity, width, lines, i));
        } else {
          throw ParseError(body_line, "rational functions need a 'poly' body");
        }
      },
      *ring);
}

namespace detail {

template <Ring R>
void format_header(std::ostringstream& out, const R& ring, int arity, int width) {
  out << "ring " << ring.describe() << "\n";
  out << "arity " << arity << "\n";
  if (width == 0) {
    out << "codomain scalar\n";
  } else {
    out << "codomain vector " << width << "\n";
  }
}

template <FiniteRing R>
void format_map_rows(std::ostringstream& out, const R& ring, int arity, int width, const std::vector<Elem<R>>& values) {
  const std::uint64_t size = table_size(ring, arity);
  for (std::uint64_t idx = 0; idx < size; ++idx) {
    out << "map " << point_to_string(ring, point_from_index(ring, arity, idx), ' ') << " ->";
    for (int c = 0; c < width; ++c) out << " " << ring.to_string(values[idx * width + c]);
    out << "\n";
  }
}

}  // namespace detail

/// Inverse of parse_function_table: tables become exhaustive `map` rows in
/// point order, polynomials a `poly` body in graded term order.
inline std::string format_function_table(const ParsedFunction& fn) {
  std::ostringstream out;
  std::visit(
      [&](const auto& f) {
        if constexpr (requires { f.codomain_dim(); }) {
          detail::format_header(out, f.field(), f.domain_dim(), f.codomain_dim());
          detail::format_map_rows(out, f.field(), f.domain_dim(), f.codomain_dim(), f.values());
        } else {
          detail::format_header(out, f.ring(), f.arity(), 0);
          if (const auto* p = f.poly()) {
            out << "poly\n";
            for (const auto& [m, c] : p->graded_terms()) {
              out << "term " << f.ring().to_string(c);
              for (int j : mask_indices(m)) out << " " << j;
              out << "\n";
            }
          } else {
            if constexpr (FiniteRing<std::decay_t<decltype(f.ring())>>) {
              detail::format_map_rows(out, f.ring(), f.arity(), 1, *f.table());
            }
          }
        }
      },
      fn);
  return out.str();
}

// ---------------------------------------------------------------------------
// Literals.

/// "1,2,4" -> elements.
template <Ring R>
std::vector<Elem<R>> parse_element_list(const R& ring, std::string_view csv) {
  std::vector<Elem<R>> out;
  if (csv.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = csv.find(',', pos);
    std::string_view tok = csv.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    out.push_back(ring.parse(tok));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

/// "1,1,1;1,2,4" -> points of arity n.
template <Ring R>
std::vector<Point<R>> parse_point_list(const R& ring, std::string_view text, int n) {
  std::vector<Point<R>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t semi = text.find(';', pos);
    if (semi == std::string_view::npos) semi = text.size();
    auto point = parse_element_list(ring, text.substr(pos, semi - pos));
    if (static_cast<int>(point.size()) != n) {
      throw ParseError(0, "point '" + std::string(text.substr(pos, semi - pos)) + "' should have " + std::to_string(n) +
                              " coordinates");
    }
    out.push_back(std::move(point));
    pos = semi + 1;
  }
  return out;
}

template <Ring R>
std::string points_to_string(const R& ring, const std::vector<Point<R>>& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ";";
    out += point_to_string(ring, pts[i]);
  }
  return out.empty() ? "-" : out;
}

template <Ring R>
std::string elements_to_string(const R& ring, const std::vector<Elem<R>>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += " ";
    out += ring.to_string(xs[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Certificate documents.

/// Ordered `key: value` pairs; rendered as text lines or as a JSON object
/// with the same keys and string values.
class Document {
 public:
  Document& add(std::string key, std::string value) {
    entries_.emplace_back(std::move(key), std::move(value));
    return *this;
  }

  std::optional<std::string> get(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string text() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + ": " + v + "\n";
    return out;
  }

  std::string json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : entries_) j[k] = v;
    return j.dump(2) + "\n";
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// 0 for affirmative statuses, 3 for cannot-cancel, 2 for every other
/// (negative) certificate.
inline int exit_code_for_status(std::string_view status) {
  if (status == "affine" || status == "affine-along-line" || status == "ok" || status == "found" ||
      status == "semilinear") {
    return 0;
  }
  if (status == "cannot-cancel") return 3;
  return 2;
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

template <Ring R>
std::string line_to_string(const R& ring, const Line<R>& line) {
  return "base=" + point_to_string(ring, line.base()) + " dir=" + point_to_string(ring, line.dir());
}

template <Ring R>
Document emit_certificate(const R& ring, const Certificate<R>& cert) {
  Document doc;
  std::visit(
      [&](const auto& c) {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, AffineCertificate<R>>) {
          std::vector<Elem<R>> all{c.c0};
          all.insert(all.end(), c.linear.begin(), c.linear.end());
          doc.add("status", "affine").add("coeffs", elements_to_string(ring, all));
        } else if constexpr (std::is_same_v<C, NonAffineCertificate<R>>) {
          doc.add("status", "non-affine");
          if (const auto* lf = std::get_if<LineFailure<R>>(&c.witness)) {
            doc.add("reason", lf->radial ? "radial-line" : "coordinate-line")
                .add("line", line_to_string(ring, lf->line))
                .add("witness", elements_to_string(ring, {lf->witness.r1, lf->witness.r2, lf->witness.r3}));
          } else {
            const auto& cw = std::get<CoefficientWitness<R>>(c.witness);
            doc.add("reason", "coefficient")
                .add("degree", std::to_string(cw.degree))
                .add("mask", mask_to_string(cw.mask))
                .add("value", ring.to_string(cw.value))
                .add("forced", yes_no(cw.forced));
          }
        } else if constexpr (std::is_same_v<C, CannotCancelCertificate<R>>) {
          doc.add("status", "cannot-cancel").add("degree", std::to_string(c.degree)).add("det", ring.to_string(c.det));
          if (c.direction) doc.add("direction", point_to_string(ring, *c.direction));
        } else {
          doc.add("status", "hypothesis-violation").add("description", c.description);
        }
      },
      cert);
  return doc;
}

template <Ring R>
Document emit_certificate(const BhCandidate<R>& S, const BhVerdict<R>& verdict) {
  Document doc;
  if (const auto* col = std::get_if<Collision<R>>(&verdict)) {
    doc.add("status", "collision")
        .add("h", std::to_string(col->h))
        .add("left", elements_to_string(S.ring, subset_elements(S, col->left)))
        .add("right", elements_to_string(S.ring, subset_elements(S, col->right)))
        .add("product", S.ring.to_string(col->product));
  } else {
    doc.add("status", "ok");
  }
  return doc;
}

template <Ring R>
Document emit_certificate(const BhCandidate<R>& S, const BhReport<R>& report) {
  Document doc;
  for (const auto& v : report.per_h) {
    if (std::holds_alternative<Collision<R>>(v)) return emit_certificate(S, v);
  }
  const R& ring = S.ring;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Property2Ok>) {
          doc.add("status", "ok").add("property1", "ok").add("property2", "ok");
        } else if constexpr (std::is_same_v<P, NonRegularDifference<R>>) {
          doc.add("status", "non-regular-difference")
              .add("h", std::to_string(p.h))
              .add("left", elements_to_string(ring, subset_elements(S, p.left)))
              .add("right", elements_to_string(ring, subset_elements(S, p.right)))
              .add("value", ring.to_string(p.value));
        } else {
          doc.add("status", "non-regular-element")
              .add("position", std::to_string(p.position + 1))
              .add("value", ring.to_string(p.value));
        }
      },
      report.property2);
  return doc;
}

template <FiniteRing F>
Document emit_certificate(const F& field, const SemilinearCert<F>& cert) {
  Document doc;
  doc.add("status", "semilinear")
      .add("tau", "frobenius^" + std::to_string(cert.tau_power))
      .add("offset", point_to_string(field, cert.offset))
      .add("basis_images", points_to_string(field, cert.basis_images));
  return doc;
}

template <FiniteRing F>
Document emit_certificate(const F& field, const HypothesisCheck<F>& check) {
  Document doc;
  if (const auto* bad = std::get_if<HypothesisFailure<F>>(&check)) {
    doc.add("status", "violation")
        .add("kind", bad->kind == ViolationKind::kImageNotLine ? "image-not-line" : "not-separated")
        .add("line", line_to_string(field, bad->line));
    if (bad->point) doc.add("point", point_to_string(field, *bad->point));
  } else {
    doc.add("status", "ok");
  }
  return doc;
}

template <Ring R>
Document emit_certificate(const SharpnessWitness<R>& w) {
  Document doc;
  doc.add("status", "witness")
      .add("degree", std::to_string(w.degree))
      .add("directions", points_to_string(w.poly.ring(), w.dirs))
      .add("terms", poly_to_string(w.poly));
  return doc;
}

template <Ring R>
Document emit_certificate(const R& ring, const CertifyResult<R>& result) {
  Document doc;
  if (const auto* ok = std::get_if<CertifyOk<R>>(&result)) {
    std::string dets;
    for (const auto& [k, d] : ok->dets) dets += (dets.empty() ? "" : " ") + std::to_string(k) + ":" + ring.to_string(d);
    doc.add("status", "ok")
        .add("N", std::to_string(ok->dirs.size()))
        .add("directions", points_to_string(ring, ok->dirs))
        .add("det", dets);
  } else {
    const auto& f = std::get<CertifyFailure<R>>(result);
    doc.add("status", "failure").add("degree", std::to_string(f.degree)).add("det", ring.to_string(f.det));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Subcommands.

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CliState {
  std::string input;
  std::string input_text;
  std::string ring;
  std::string dirs;
  std::string moment;
  std::string set;
  std::string base;
  std::string dir;
  std::string mode = "exhaustive";
  std::string g;
  bool family = false;
  int n = 0;
  int h = 0;
  int count = 0;
  std::uint64_t budget = 1'000'000;
};

template <Ring R>
Point<R> parse_point(const R& ring, const std::string& text, int n) {
  return parse_point_list(ring, text, n).front();
}

template <Ring R>
DirectionSet<R> directions_from_args(const R& ring, int n, const CliState& st, bool allow_none) {
  const int sources = (!st.dirs.empty()) + (!st.moment.empty()) + (st.family ? 1 : 0);
  if (sources > 1) throw PreconditionError("give at most one of --dirs, --moment, --family");
  if (sources == 0) {
    if (allow_none) return {};
    throw PreconditionError("give one of --dirs, --moment, --family");
  }
  if (!st.dirs.empty()) return DirectionSet<R>{parse_point_list(ring, st.dirs, n), DirectionProvenance::kCustom};
  if (st.family) return family_directions(ring, n);
  const auto S = parse_element_list(ring, st.moment);
  if (static_cast<int>(S.size()) != n) throw PreconditionError("--moment needs " + std::to_string(n) + " elements");
  const int count = st.count > 0 ? st.count : static_cast<int>(minimal_direction_count(std::max(n, 2)));
  return moment_directions(ring, S, count);
}

inline std::string provenance_name(DirectionProvenance p) {
  switch (p) {
    case DirectionProvenance::kFamily: return "family";
    case DirectionProvenance::kMoment: return "moment";
    case DirectionProvenance::kCustom: return "custom";
  }
  return "custom";
}

template <class Fn>
Document with_scalar(const ParsedFunction& fn, Fn&& body) {
  return std::visit(
      [&](const auto& f) -> Document {
        if constexpr (requires { f.codomain_dim(); }) {
          throw PreconditionError("this subcommand needs a scalar function table");
        } else {
          return body(f);
        }
      },
      fn);
}

template <class Fn>
Document with_vector(const ParsedFunction& fn, Fn&& body) {
  return std::visit(
      [&](const auto& f) -> Document {
        if constexpr (requires { f.codomain_dim(); }) {
          return body(f);
        } else {
          throw PreconditionError("this subcommand needs a 'codomain vector' table");
        }
      },
      fn);
}

template <class Fn>
Document with_ring(const std::string& literal, Fn&& body) {
  if (literal.empty()) throw PreconditionError("--ring is required");
  return std::visit([&](const auto& r) -> Document { return body(r); }, parse_ring(literal));
}

inline Document cmd_check_line(const CliState& st) {
  return with_scalar(parse_function_table(st.input_text), [&](const auto& f) {
    const auto& ring = f.ring();
    const int n = f.arity();
    const auto base = st.base.empty() ? zero_point(ring, n) : parse_point(ring, st.base, n);
    const Line line(ring, base, parse_point(ring, st.dir, n));
    const auto check = line_affine_check(f, line);
    Document doc;
    if (const auto* ok = std::get_if<0>(&check)) {
      doc.add("status", "affine-along-line").add("line", line_to_string(ring, line)).add("slope", ring.to_string(ok->slope));
    } else {
      const auto& w = std::get<1>(check);
      doc.add("status", "not-affine-along-line")
          .add("line", line_to_string(ring, line))
          .add("witness", elements_to_string(ring, {w.r1, w.r2, w.r3}))
          .add("values", elements_to_string(ring, {f(line.at(ring, w.r1)), f(line.at(ring, w.r2)), f(line.at(ring, w.r3))}));
    }
    return doc;
  });
}

inline Document cmd_psi(const CliState& st) {
  return with_scalar(parse_function_table(st.input_text), [&](const auto& f) {
    const auto& ring = f.ring();
    const int n = f.arity();
    const auto base = st.base.empty() ? zero_point(ring, n) : parse_point(ring, st.base, n);
    const auto psi = psi_extract(f, base, n);
    Document doc;
    doc.add("status", "ok")
        .add("base", point_to_string(ring, base))
        .add("terms", poly_to_string(psi))
        .add("degree", std::to_string(std::max(psi.degree(), 0)))
        .add("affine", yes_no(is_affine_poly(psi)));
    return doc;
  });
}

inline Document cmd_recover(const CliState& st) {
  RecoverOptions options;
  if (st.mode == "nodes") {
    options.mode = ConstraintMode::kProofNodes;
  } else if (st.mode != "exhaustive") {
    throw PreconditionError("--mode is 'exhaustive' or 'nodes'");
  }
  return with_scalar(parse_function_table(st.input_text), [&](const auto& f) {
    const auto dirs = directions_from_args(f.ring(), f.arity(), st, false);
    Document doc = emit_certificate(f.ring(), recover(f, dirs, options));
    doc.add("directions", points_to_string(f.ring(), dirs.dirs));
    return doc;
  });
}

inline Document cmd_directions(const CliState& st) {
  return with_ring(st.ring, [&](const auto& ring) {
    check_arity(st.n);
    const auto dirs = directions_from_args(ring, st.n, st, false);
    Document doc;
    doc.add("status", "ok")
        .add("provenance", provenance_name(dirs.provenance))
        .add("count", std::to_string(dirs.dirs.size()))
        .add("directions", points_to_string(ring, dirs.dirs));
    return doc;
  });
}

inline Document cmd_bh_verify(const CliState& st) {
  return with_ring(st.ring, [&](const auto& ring) {
    BhCandidate S(ring, parse_element_list(ring, st.set));
    if (st.h != 0) return emit_certificate(S, verify_bh(S, st.h));
    return emit_certificate(S, verify_properties(S));
  });
}

inline Document cmd_bh_search(const CliState& st) {
  return with_ring(st.ring, [&](const auto& ring) {
    const auto found = search_bh(ring, st.n, st.budget);
    Document doc;
    if (found) {
      doc.add("status", "found").add("set", elements_to_string(ring, found->elements));
    } else {
      doc.add("status", "none");
    }
    return doc;
  });
}

inline Document cmd_bh_geometric(const CliState& st) {
  return with_ring(st.ring, [&](const auto& ring) {
    const auto S = construct_geometric(ring, ring.parse(st.g), st.n);
    Document doc;
    doc.add("status", "ok").add("set", elements_to_string(ring, S.elements));
    if (S.size() >= 3) doc.add("verified", yes_no(verify_properties(S).ok()));
    return doc;
  });
}

inline Document cmd_sharpness_bound(const CliState& st) {
  Document doc;
  doc.add("status", "ok").add("n", std::to_string(st.n)).add("N", std::to_string(minimal_direction_count(st.n)));
  return doc;
}

inline Document cmd_sharpness_witness(const CliState& st) {
  return with_ring(st.ring, [&](const auto& ring) {
    const auto D = directions_from_args(ring, st.n, st, true);
    Document doc = emit_certificate(lower_bound_witness(ring, st.n, D));
    doc.add("N", std::to_string(minimal_direction_count(st.n)));
    return doc;
  });
}

inline Document cmd_sharpness_certify(const CliState& st) {
  return with_ring(st.ring, [&](const auto& ring) {
    const BhCandidate S(ring, parse_element_list(ring, st.set));
    return emit_certificate(ring, certify_directions(S));
  });
}

inline Document cmd_vonstaudt(const CliState& st, bool recover_map) {
  return with_vector(parse_function_table(st.input_text), [&](const auto& f) {
    const auto check = check_hypotheses(f);
    if (!recover_map || !std::holds_alternative<HypothesesOk>(check)) {
      Document doc = emit_certificate(f.field(), check);
      if (std::holds_alternative<HypothesesOk>(check)) {
        doc.add("lines", std::to_string(enumerate_affine_lines(f.field(), f.domain_dim()).size()));
      }
      return doc;
    }
    return emit_certificate(f.field(), recover_semilinear(f));
  });
}

}  // namespace detail

/// Runs one command line (without the program name). Never throws; failures
/// become exit code 1 with a message on `err`.
inline CliResult run_subcommand(const std::vector<std::string>& args) {
  detail::CliState st;
  bool json = false;
  CLI::App app{"Decide and certify affine-linearity of functions from their restrictions to lines", "affine"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.fallthrough();
  app.require_subcommand(1);
  app.add_flag("--json", json, "Emit the document as JSON");

  auto add_input = [&](CLI::App* sub) { sub->add_option("--input", st.input, "Function table file")->required(); };
  auto add_ring = [&](CLI::App* sub) { sub->add_option("--ring", st.ring, "Ring literal, e.g. \"prime 7\"")->required(); };
  auto add_dirs = [&](CLI::App* sub) {
    sub->add_option("--dirs", st.dirs, "Directions, e.g. \"1,1,1;1,2,4\"");
    sub->add_option("--moment", st.moment, "Moment directions from the set s_1,..,s_n");
    sub->add_option("--count", st.count, "Number of moment directions (default N)");
  };

  auto* check_line = app.add_subcommand("check-line", "Affinity of f along one line");
  add_input(check_line);
  check_line->add_option("--dir", st.dir, "Line direction")->required();
  check_line->add_option("--base", st.base, "Line base point (default 0)");

  auto* psi = app.add_subcommand("psi", "Finite-difference coefficients of f at a base point");
  add_input(psi);
  psi->add_option("--base", st.base, "Base point (default 0)");

  auto* recover_cmd = app.add_subcommand("recover", "Decide global affinity from coordinate and radial lines");
  add_input(recover_cmd);
  add_dirs(recover_cmd);
  recover_cmd->add_flag("--family", st.family, "All-ones family directions for every |J| >= 2");
  recover_cmd->add_option("--mode", st.mode, "exhaustive | nodes");

  auto* directions = app.add_subcommand("directions", "List a direction set");
  add_ring(directions);
  directions->add_option("--n", st.n, "Arity")->required();
  add_dirs(directions);
  directions->add_flag("--family", st.family, "All-ones family directions");

  auto* bh = app.add_subcommand("bh", "Weak multiplicative B_h-sets");
  bh->require_subcommand(1);
  auto* bh_verify = bh->add_subcommand("verify", "Check B_h for one h, or properties (1)/(2)");
  add_ring(bh_verify);
  bh_verify->add_option("--set", st.set, "Elements, e.g. 1,2,4")->required();
  bh_verify->add_option("--h", st.h, "Check only this h");
  auto* bh_search = bh->add_subcommand("search", "Lexicographic search for a valid set");
  add_ring(bh_search);
  bh_search->add_option("--n", st.n, "Set size")->required();
  bh_search->add_option("--budget", st.budget, "Maximum number of candidates");
  auto* bh_geometric = bh->add_subcommand("geometric", "The set {1, g, g^2, g^4, ...}");
  add_ring(bh_geometric);
  bh_geometric->add_option("--g", st.g, "Generator")->required();
  bh_geometric->add_option("--n", st.n, "Set size")->required();

  auto* sharp = app.add_subcommand("sharpness", "Minimal number of radial directions");
  sharp->require_subcommand(1);
  auto* sharp_bound = sharp->add_subcommand("bound", "N = C(n, ceil(n/2))");
  sharp_bound->add_option("--n", st.n, "Arity")->required();
  auto* sharp_witness = sharp->add_subcommand("witness", "Non-affine polynomial defeating fewer than N directions");
  add_ring(sharp_witness);
  sharp_witness->add_option("--n", st.n, "Arity")->required();
  add_dirs(sharp_witness);
  auto* sharp_certify = sharp->add_subcommand("certify", "Certify the N moment directions of a set");
  add_ring(sharp_certify);
  sharp_certify->add_option("--set", st.set, "Elements s_1,..,s_n")->required();

  auto* vs = app.add_subcommand("vonstaudt", "Maps sending lines onto lines");
  vs->require_subcommand(1);
  auto* vs_check = vs->add_subcommand("check", "Check the line and separation hypotheses");
  add_input(vs_check);
  auto* vs_recover = vs->add_subcommand("recover", "Recover (tau, basis images, offset)");
  add_input(vs_recover);

  CliResult result;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    result.out = app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    result.code = 1;
    result.err = std::string("error: ") + e.what() + "\n" + app.help();
    return result;
  }

  try {
    std::uint64_t digest = 14695981039346656037ull;
    for (const auto& a : args) {
      if (a == "--json") continue;
      digest = fnv1a64(a, digest);
      digest = fnv1a64(std::string_view("\x1f", 1), digest);
    }
    if (!st.input.empty()) {
      st.input_text = detail::read_file(st.input);
      digest = fnv1a64(st.input_text, digest);
    }

    Document doc;
    if (check_line->parsed()) {
      doc = detail::cmd_check_line(st);
    } else if (psi->parsed()) {
      doc = detail::cmd_psi(st);
    } else if (recover_cmd->parsed()) {
      doc = detail::cmd_recover(st);
    } else if (directions->parsed()) {
      doc = detail::cmd_directions(st);
    } else if (bh_verify->parsed()) {
      doc = detail::cmd_bh_verify(st);
    } else if (bh_search->parsed()) {
      doc = detail::cmd_bh_search(st);
    } else if (bh_geometric->parsed()) {
      doc = detail::cmd_bh_geometric(st);
    } else if (sharp_bound->parsed()) {
      doc = detail::cmd_sharpness_bound(st);
    } else if (sharp_witness->parsed()) {
      doc = detail::cmd_sharpness_witness(st);
    } else if (sharp_certify->parsed()) {
      doc = detail::cmd_sharpness_certify(st);
    } else if (vs_check->parsed()) {
      doc = detail::cmd_vonstaudt(st, false);
    } else {
      doc = detail::cmd_vonstaudt(st, true);
    }
    result.code = exit_code_for_status(doc.get("status").value_or(""));
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(digest));
    doc.add("version", std::string(kVersion)).add("input_digest", std::string("fnv1a64:") + hex);
    result.out = json ? doc.json() : doc.text();
  } catch (const std::exception& e) {
    result.code = 1;
    result.out.clear();
    result.err = std::string("error: ") + e.what() + "\n";
  }
  return result;
}

}  // namespace affine
