#pragma once

// Exact coefficient rings: Z/m, prime fields, small Galois fields and Q.
//
// Every ring is a small value object exposing arithmetic on its
// `value_type`; elements themselves carry no ring pointer, so the generic
// algorithms take the ring alongside the values. `RingElem` at the bottom of
// this header is the self-describing form used at API boundaries where the
// ring is only known at runtime.

#include <algorithm>
#include <charconv>
#include <concepts>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "affine/errors.hpp"

namespace affine {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class ArithOp { kAdd, kSub, kMul, kNeg };

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  if (s.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::uint64_t parse_u64_or_throw(std::string_view s, std::string_view what) {
  auto v = parse_u64(s);
  if (!v) throw ParseError(0, "expected non-negative integer for " + std::string(what) + ", got '" +
                                  std::string(s) + "'");
  return *v;
}

}  // namespace detail

/// Z/m for 2 <= m <= 2^32. Declared either as `zmod m` or `prime p`; the two
/// literals are distinct rings for mismatch purposes, but `is_field()` reflects
/// the mathematics (Z/5 declared as zmod is still a field).
class ZMod {
 public:
  using value_type = std::uint64_t;
  static constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 32;

  static ZMod zmod(std::uint64_t m) {
    if (m < 2) throw PreconditionError("zmod modulus must be >= 2");
    if (m > kMaxModulus) throw PreconditionError("zmod modulus exceeds 2^32");
    return ZMod(m, false);
  }

  static ZMod prime(std::uint64_t p) {
    if (!is_prime(p)) throw PreconditionError(std::to_string(p) + " is not prime");
    if (p > kMaxModulus) throw PreconditionError("prime exceeds 2^32");
    return ZMod(p, true);
  }

  std::uint64_t modulus() const { return m_; }
  bool declared_prime() const { return declared_prime_; }
  bool is_field() const { return field_; }
  bool is_finite() const { return true; }
  std::uint64_t size() const { return m_; }
  std::uint64_t characteristic() const { return m_; }
  // Degree over the prime field; only meaningful when is_field().
  int extension_degree() const { return 1; }

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type from_int(long long v) const {
    long long r = v % static_cast<long long>(m_);
    if (r < 0) r += static_cast<long long>(m_);
    return static_cast<value_type>(r);
  }

  value_type add(value_type a, value_type b) const {
    value_type s = a + b;
    return s >= m_ ? s - m_ : s;
  }
  value_type sub(value_type a, value_type b) const { return a >= b ? a - b : a + (m_ - b); }
  value_type mul(value_type a, value_type b) const { return (a * b) % m_; }
  value_type neg(value_type a) const { return a == 0 ? 0 : m_ - a; }

  bool is_zero(value_type a) const { return a == 0; }
  bool is_regular(value_type a) const { return std::gcd(a, m_) == 1; }

  std::optional<value_type> inverse(value_type a) const {
    // Extended Euclid on signed 128-bit to avoid overflow for m near 2^32.
    __int128 old_r = static_cast<__int128>(a), r = static_cast<__int128>(m_);
    __int128 old_s = 1, s = 0;
    while (r != 0) {
      __int128 q = old_r / r;
      __int128 t = old_r - q * r;
      old_r = r;
      r = t;
      t = old_s - q * s;
      old_s = s;
      s = t;
    }
    if (old_r != 1) return std::nullopt;
    __int128 inv = old_s % static_cast<__int128>(m_);
    if (inv < 0) inv += m_;
    return static_cast<value_type>(inv);
  }

  value_type element(std::uint64_t index) const { return index; }
  std::uint64_t index(value_type a) const { return a; }

  value_type frobenius(value_type a, std::uint64_t /*j*/) const {
    if (!field_) throw Unsupported("frobenius requires a finite field, got " + describe());
    return a;
  }

  std::string to_string(value_type a) const { return std::to_string(a); }

  value_type parse(std::string_view s) const {
    auto v = detail::parse_u64(s);
    if (!v || *v >= m_) {
      throw ParseError(0, "value '" + std::string(s) + "' out of range for " + describe());
    }
    return *v;
  }

  std::string describe() const {
    return (declared_prime_ ? "prime " : "zmod ") + std::to_string(m_);
  }

  bool operator==(const ZMod&) const = default;

 private:
  ZMod(std::uint64_t m, bool declared_prime)
      : m_(m), declared_prime_(declared_prime), field_(is_prime(m)) {}

  std::uint64_t m_;
  bool declared_prime_;
  bool field_;
};

/// GF(p^k) = F_p[t]/(t^k + c_{k-1} t^{k-1} + ... + c_0), k <= 4, p^k <= 81.
/// Elements are encoded as sum d_i p^i over their coefficient digits, so
/// encodings 0 and 1 are the field's zero and one.
class GaloisField {
 public:
  using value_type = std::uint64_t;
  static constexpr std::uint64_t kMaxOrder = 81;
  static constexpr int kMaxDegree = 4;

  GaloisField(std::uint64_t p, int k, std::vector<std::uint64_t> modulus_low)
      : p_(p), k_(k), modulus_(std::move(modulus_low)) {
    if (!is_prime(p)) throw PreconditionError("gf characteristic " + std::to_string(p) + " is not prime");
    if (k < 1 || k > kMaxDegree) throw PreconditionError("gf degree must be in [1, 4]");
    if (static_cast<int>(modulus_.size()) != k) {
      throw PreconditionError("gf modulus needs exactly k = " + std::to_string(k) + " coefficients");
    }
    q_ = 1;
    for (int i = 0; i < k; ++i) q_ *= p;
    if (q_ > kMaxOrder) throw PreconditionError("gf order p^k exceeds 81");
    for (auto c : modulus_) {
      if (c >= p) throw PreconditionError("gf modulus coefficient out of range [0, p)");
    }
    if (!modulus_irreducible()) throw PreconditionError("gf modulus is reducible over F_p");
    build_tables();
  }

  std::uint64_t p() const { return p_; }
  int k() const { return k_; }
  const std::vector<std::uint64_t>& modulus_coeffs() const { return modulus_; }

  bool is_field() const { return true; }
  bool is_finite() const { return true; }
  std::uint64_t size() const { return q_; }
  std::uint64_t characteristic() const { return p_; }
  int extension_degree() const { return k_; }

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type from_int(long long v) const {
    long long r = v % static_cast<long long>(p_);
    if (r < 0) r += static_cast<long long>(p_);
    return static_cast<value_type>(r);
  }

  value_type add(value_type a, value_type b) const { return tables_->add[a * q_ + b]; }
  value_type sub(value_type a, value_type b) const { return tables_->add[a * q_ + tables_->neg[b]]; }
  value_type mul(value_type a, value_type b) const { return tables_->mul[a * q_ + b]; }
  value_type neg(value_type a) const { return tables_->neg[a]; }

  bool is_zero(value_type a) const { return a == 0; }
  bool is_regular(value_type a) const { return a != 0; }
  std::optional<value_type> inverse(value_type a) const {
    if (a == 0) return std::nullopt;
    return tables_->inv[a];
  }

  value_type element(std::uint64_t index) const { return index; }
  std::uint64_t index(value_type a) const { return a; }

  /// x^(p^j).
  value_type frobenius(value_type a, std::uint64_t j) const {
    for (std::uint64_t step = 0; step < j % static_cast<std::uint64_t>(k_); ++step) {
      value_type acc = 1;
      for (std::uint64_t e = 0; e < p_; ++e) acc = mul(acc, a);
      a = acc;
    }
    return a;
  }

  std::vector<std::uint64_t> digits(value_type a) const {
    std::vector<std::uint64_t> d(k_);
    for (int i = 0; i < k_; ++i) {
      d[i] = a % p_;
      a /= p_;
    }
    return d;
  }

  value_type from_digits(const std::vector<std::uint64_t>& d) const {
    value_type v = 0;
    for (int i = k_ - 1; i >= 0; --i) v = v * p_ + d[i];
    return v;
  }

  std::string to_string(value_type a) const { return std::to_string(a); }

  value_type parse(std::string_view s) const {
    auto v = detail::parse_u64(s);
    if (!v || *v >= q_) {
      throw ParseError(0, "value '" + std::string(s) + "' out of range for " + describe());
    }
    return *v;
  }

  std::string describe() const {
    std::string out = "gf " + std::to_string(p_) + " " + std::to_string(k_);
    for (auto c : modulus_) out += " " + std::to_string(c);
    return out;
  }

  bool operator==(const GaloisField& o) const {
    return p_ == o.p_ && k_ == o.k_ && modulus_ == o.modulus_;
  }

 private:
  struct Tables {
    std::vector<value_type> add, mul, neg, inv;
  };

  // Polynomials over F_p as little-endian digit vectors.
  using Poly = std::vector<std::uint64_t>;

  static void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
  }

  Poly poly_mod(Poly a, const Poly& m) const {
    trim(a);
    // m is monic
    while (a.size() >= m.size()) {
      std::uint64_t lead = a.back();
      std::size_t shift = a.size() - m.size();
      for (std::size_t i = 0; i < m.size(); ++i) {
        a[shift + i] = (a[shift + i] + p_ * p_ - lead * m[i] % p_) % p_;
      }
      trim(a);
    }
    return a;
  }

  Poly full_modulus() const {
    Poly m(modulus_.begin(), modulus_.end());
    m.push_back(1);
    return m;
  }

  // Exhaustive search for a monic factor of degree 1..k/2.
  bool modulus_irreducible() const {
    const Poly m = full_modulus();
    for (int d = 1; d <= k_ / 2; ++d) {
      std::uint64_t count = 1;
      for (int i = 0; i < d; ++i) count *= p_;
      for (std::uint64_t code = 0; code < count; ++code) {
        Poly f(d + 1);
        std::uint64_t c = code;
        for (int i = 0; i < d; ++i) {
          f[i] = c % p_;
          c /= p_;
        }
        f[d] = 1;
        if (poly_mod(m, f).empty()) return false;
      }
    }
    return true;
  }

  void build_tables() {
    auto t = std::make_shared<Tables>();
    t->add.resize(q_ * q_);
    t->mul.resize(q_ * q_);
    t->neg.resize(q_);
    t->inv.assign(q_, 0);
    const Poly m = full_modulus();
    for (value_type a = 0; a < q_; ++a) {
      auto da = digits(a);
      std::vector<std::uint64_t> dn(k_);
      for (int i = 0; i < k_; ++i) dn[i] = (p_ - da[i]) % p_;
      t->neg[a] = from_digits(dn);
      for (value_type b = 0; b < q_; ++b) {
        auto db = digits(b);
        std::vector<std::uint64_t> ds(k_);
        for (int i = 0; i < k_; ++i) ds[i] = (da[i] + db[i]) % p_;
        t->add[a * q_ + b] = from_digits(ds);
        Poly prod(2 * k_, 0);
        for (int i = 0; i < k_; ++i) {
          for (int j = 0; j < k_; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
        }
        Poly r = poly_mod(prod, m);
        r.resize(k_, 0);
        t->mul[a * q_ + b] = from_digits(r);
      }
    }
    for (value_type a = 1; a < q_; ++a) {
      for (value_type b = 1; b < q_; ++b) {
        if (t->mul[a * q_ + b] == 1) {
          t->inv[a] = b;
          break;
        }
      }
    }
    tables_ = std::move(t);
  }

  std::uint64_t p_;
  int k_;
  std::vector<std::uint64_t> modulus_;
  std::uint64_t q_ = 0;
  std::shared_ptr<const Tables> tables_;
};

/// Q with canonical reduced fractions (positive denominator).
class Rationals {
 public:
  using value_type = Rational;

  bool is_field() const { return true; }
  bool is_finite() const { return false; }

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type from_int(long long v) const { return value_type(v); }

  value_type add(const value_type& a, const value_type& b) const { return a + b; }
  value_type sub(const value_type& a, const value_type& b) const { return a - b; }
  value_type mul(const value_type& a, const value_type& b) const { return a * b; }
  value_type neg(const value_type& a) const { return -a; }

  bool is_zero(const value_type& a) const { return a == 0; }
  bool is_regular(const value_type& a) const { return a != 0; }
  std::optional<value_type> inverse(const value_type& a) const {
    if (a == 0) return std::nullopt;
    return value_type(1) / a;
  }

  value_type frobenius(const value_type&, std::uint64_t) const {
    throw Unsupported("frobenius requires a finite field, got rational");
  }

  std::string to_string(const value_type& a) const {
    if (denominator(a) == 1) return numerator(a).str();
    return numerator(a).str() + "/" + denominator(a).str();
  }

  value_type parse(std::string_view s) const {
    auto bad = [&] { return ParseError(0, "malformed rational '" + std::string(s) + "'"); };
    auto parse_int = [&](std::string_view t) {
      std::string_view digits = t;
      if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) digits.remove_prefix(1);
      if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw bad();
      }
      BigInt v{std::string(digits)};
      if (t[0] == '-') v = -v;
      return v;
    };
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return value_type(parse_int(s));
    BigInt num = parse_int(s.substr(0, slash));
    BigInt den = parse_int(s.substr(slash + 1));
    if (den == 0) throw ParseError(0, "zero denominator in '" + std::string(s) + "'");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    return value_type(num, den);
  }

  std::string describe() const { return "rational"; }

  bool operator==(const Rationals&) const { return true; }
};

template <class R>
concept Ring = requires(const R& r, const typename R::value_type& a, long long i, std::string_view s) {
  typename R::value_type;
  requires std::regular<typename R::value_type>;
  requires std::totally_ordered<typename R::value_type>;
  { r.zero() } -> std::same_as<typename R::value_type>;
  { r.one() } -> std::same_as<typename R::value_type>;
  { r.from_int(i) } -> std::same_as<typename R::value_type>;
  { r.add(a, a) } -> std::same_as<typename R::value_type>;
  { r.sub(a, a) } -> std::same_as<typename R::value_type>;
  { r.mul(a, a) } -> std::same_as<typename R::value_type>;
  { r.neg(a) } -> std::same_as<typename R::value_type>;
  { r.is_zero(a) } -> std::same_as<bool>;
  { r.is_regular(a) } -> std::same_as<bool>;
  { r.inverse(a) } -> std::same_as<std::optional<typename R::value_type>>;
  { r.is_field() } -> std::same_as<bool>;
  { r.is_finite() } -> std::same_as<bool>;
  { r.to_string(a) } -> std::same_as<std::string>;
  { r.parse(s) } -> std::same_as<typename R::value_type>;
  { r.describe() } -> std::same_as<std::string>;
  { r == r } -> std::same_as<bool>;
};

template <class R>
concept FiniteRing = Ring<R> && requires(const R& r, const typename R::value_type& a, std::uint64_t i) {
  { r.size() } -> std::same_as<std::uint64_t>;
  { r.element(i) } -> std::same_as<typename R::value_type>;
  { r.index(a) } -> std::same_as<std::uint64_t>;
};

template <Ring R>
using Elem = typename R::value_type;

template <Ring R>
Elem<R> ring_pow(const R& ring, Elem<R> base, std::uint64_t e) {
  Elem<R> acc = ring.one();
  while (e > 0) {
    if (e & 1) acc = ring.mul(acc, base);
    base = ring.mul(base, base);
    e >>= 1;
  }
  return acc;
}

template <Ring R>
bool is_regular(const R& ring, const Elem<R>& r) {
  return ring.is_regular(r);
}

/// True iff 1, 1+1, ..., n*1 are all non-zerodivisors.
template <Ring R>
bool characteristic_regular_upto(const R& ring, int n) {
  if (n < 1) throw PreconditionError("characteristic_regular_upto needs n >= 1");
  Elem<R> acc = ring.zero();
  for (int i = 1; i <= n; ++i) {
    acc = ring.add(acc, ring.one());
    if (!ring.is_regular(acc)) return false;
  }
  return true;
}

template <Ring R>
std::vector<Elem<R>> enumerate_elements(const R& ring) {
  if constexpr (FiniteRing<R>) {
    std::vector<Elem<R>> out;
    out.reserve(ring.size());
    for (std::uint64_t i = 0; i < ring.size(); ++i) out.push_back(ring.element(i));
    return out;
  } else {
    throw Unsupported(ring.describe() + " is not enumerable");
  }
}

/// x^(p^j) over a finite field.
template <Ring R>
Elem<R> frobenius(const R& ring, const Elem<R>& x, std::uint64_t j) {
  return ring.frobenius(x, j);
}

template <Ring R>
Elem<R> ring_inverse(const R& ring, const Elem<R>& x) {
  auto inv = ring.inverse(x);
  if (!inv) throw PreconditionError(ring.to_string(x) + " is not invertible in " + ring.describe());
  return *inv;
}

// ---------------------------------------------------------------------------
// Runtime-typed rings and elements.

using AnyRing = std::variant<ZMod, GaloisField, Rationals>;

inline AnyRing parse_ring(const std::vector<std::string>& tok) {
  if (tok.empty()) throw ParseError(0, "empty ring literal");
  const std::string& kind = tok[0];
  auto arity_check = [&](std::size_t n) {
    if (tok.size() != n) throw ParseError(0, "ring literal '" + kind + "' expects " + std::to_string(n - 1) + " argument(s)");
  };
  try {
    if (kind == "zmod") {
      arity_check(2);
      return ZMod::zmod(detail::parse_u64_or_throw(tok[1], "zmod modulus"));
    }
    if (kind == "prime") {
      arity_check(2);
      return ZMod::prime(detail::parse_u64_or_throw(tok[1], "prime"));
    }
    if (kind == "gf") {
      if (tok.size() < 3) throw ParseError(0, "gf literal needs p and k");
      auto p = detail::parse_u64_or_throw(tok[1], "gf p");
      auto k = detail::parse_u64_or_throw(tok[2], "gf k");
      if (k < 1 || k > GaloisField::kMaxDegree) throw PreconditionError("gf degree must be in [1, 4]");
      arity_check(3 + k);
      std::vector<std::uint64_t> coeffs;
      for (std::size_t i = 0; i < k; ++i) coeffs.push_back(detail::parse_u64_or_throw(tok[3 + i], "gf coefficient"));
      return GaloisField(p, static_cast<int>(k), coeffs);
    }
    if (kind == "rational") {
      arity_check(1);
      return Rationals{};
    }
  } catch (const PreconditionError& e) {
    throw ParseError(0, std::string("invalid ring: ") + e.what());
  }
  throw ParseError(0, "unknown ring kind '" + kind + "'");
}

inline AnyRing parse_ring(std::string_view literal) { return parse_ring(detail::split_ws(literal)); }

inline std::string describe(const AnyRing& ring) {
  return std::visit([](const auto& r) { return r.describe(); }, ring);
}

using AnyValue = std::variant<std::uint64_t, Rational>;

/// An element tagged with its ring, for runtime-typed arithmetic.
struct RingElem {
  AnyRing ring;
  AnyValue value;

  bool operator==(const RingElem&) const = default;
};

inline RingElem make_elem(const AnyRing& ring, std::string_view literal) {
  return std::visit([&](const auto& r) { return RingElem{ring, AnyValue(r.parse(literal))}; }, ring);
}

inline std::string to_string(const RingElem& e) {
  return std::visit(
      [&](const auto& r) {
        using V = Elem<std::decay_t<decltype(r)>>;
        return r.to_string(std::get<V>(e.value));
      },
      e.ring);
}

inline RingElem ring_arith(const RingElem& a, const RingElem& b, ArithOp op) {
  if (!(a.ring == b.ring)) {
    throw RingMismatch("ring mismatch: " + describe(a.ring) + " vs " + describe(b.ring));
  }
  return std::visit(
      [&](const auto& r) {
        using V = Elem<std::decay_t<decltype(r)>>;
        const V& x = std::get<V>(a.value);
        const V& y = std::get<V>(b.value);
        switch (op) {
          case ArithOp::kAdd: return RingElem{a.ring, AnyValue(r.add(x, y))};
          case ArithOp::kSub: return RingElem{a.ring, AnyValue(r.sub(x, y))};
          case ArithOp::kMul: return RingElem{a.ring, AnyValue(r.mul(x, y))};
          case ArithOp::kNeg: return RingElem{a.ring, AnyValue(r.neg(x))};
        }
        throw PreconditionError("unknown arithmetic op");
      },
      a.ring);
}

inline bool is_regular(const RingElem& e) {
  return std::visit(
      [&](const auto& r) {
        using V = Elem<std::decay_t<decltype(r)>>;
        return r.is_regular(std::get<V>(e.value));
      },
      e.ring);
}

}  // namespace affine
