#pragma once

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "corona/grid.hpp"
#include "corona/polynomial.hpp"

namespace corona {

/**
 * Symbolic holomorphic function on the closed unit disc.
 *
 * Leaves are polynomials, rationals p/q (q nonvanishing on the closed disc) and
 * finite Blaschke products prod (z - a)/(1 - conj(a) z) with |a| < 1. Inner nodes
 * are pointwise sums, products and real scalings. Every variant has an exact
 * derivative rule, so derivative() is again a FunctionSpec.
 *
 * Text syntax:
 *   poly:c0,c1,...            coefficients constant-first, complex literals a+bi
 *   blaschke:a1;a2;...        zeros of the product
 *   rat:(poly:...)/(poly:...) quotient
 *   A+B, A*B, 2.5*A, (A)      sums, products, real prefixes, grouping
 */
class FunctionSpec {
 public:
  struct Poly {
    Polynomial p;
  };
  struct Rational {
    Polynomial num, den;
  };
  struct Blaschke {
    std::vector<cplx> zeros;
  };
  struct Sum {
    std::shared_ptr<const FunctionSpec> a, b;
  };
  struct Product {
    std::shared_ptr<const FunctionSpec> a, b;
  };
  struct Scale {
    double s;
    std::shared_ptr<const FunctionSpec> a;
  };
  using Node = std::variant<Poly, Rational, Blaschke, Sum, Product, Scale>;

  static FunctionSpec polynomial(Polynomial p) { return FunctionSpec(Poly{std::move(p)}); }
  static FunctionSpec constant(cplx c) { return polynomial(Polynomial::constant(c)); }
  static FunctionSpec rational(Polynomial num, Polynomial den) {
    if (den.degree() < 0) throw CoronaError("rational spec with zero denominator");
    return FunctionSpec(Rational{std::move(num), std::move(den)});
  }
  static FunctionSpec blaschke(std::vector<cplx> zeros) {
    for (cplx a : zeros)
      if (!(std::abs(a) < 1.0)) throw CoronaError("Blaschke zero " + format_complex(a) + " is not inside the unit disc");
    return FunctionSpec(Blaschke{std::move(zeros)});
  }

  /// Parses the text syntax; throws CoronaError with the offending position.
  static FunctionSpec parse(std::string_view text);

  friend FunctionSpec operator+(const FunctionSpec& a, const FunctionSpec& b) {
    return FunctionSpec(Sum{std::make_shared<const FunctionSpec>(a), std::make_shared<const FunctionSpec>(b)});
  }
  friend FunctionSpec operator*(const FunctionSpec& a, const FunctionSpec& b) {
    return FunctionSpec(Product{std::make_shared<const FunctionSpec>(a), std::make_shared<const FunctionSpec>(b)});
  }
  friend FunctionSpec operator*(double s, const FunctionSpec& a) {
    return FunctionSpec(Scale{s, std::make_shared<const FunctionSpec>(a)});
  }

  const Node& node() const { return node_; }

  /// Exact evaluation; throws if a rational denominator vanishes at z.
  cplx operator()(cplx z) const {
    return std::visit(
        [z](const auto& n) -> cplx {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Poly>) {
            return n.p(z);
          } else if constexpr (std::is_same_v<T, Rational>) {
            const cplx d = n.den(z);
            if (d == cplx(0.0)) throw CoronaError("rational spec denominator vanishes at z = " + format_complex(z));
            return n.num(z) / d;
          } else if constexpr (std::is_same_v<T, Blaschke>) {
            cplx acc = 1.0;
            for (cplx a : n.zeros) acc *= (z - a) / (1.0 - std::conj(a) * z);
            return acc;
          } else if constexpr (std::is_same_v<T, Sum>) {
            return (*n.a)(z) + (*n.b)(z);
          } else if constexpr (std::is_same_v<T, Product>) {
            return (*n.a)(z) * (*n.b)(z);
          } else {
            return n.s * (*n.a)(z);
          }
        },
        node_);
  }

  std::vector<cplx> eval(const std::vector<cplx>& points) const {
    std::vector<cplx> out;
    out.reserve(points.size());
    for (cplx z : points) out.push_back((*this)(z));
    return out;
  }

  ScalarField sample(const PolarGrid& grid) const {
    return ScalarField::sample(grid, [this](cplx z) { return (*this)(z); });
  }

  FunctionSpec derivative() const {
    return std::visit(
        [this](const auto& n) -> FunctionSpec {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Poly>) {
            return polynomial(n.p.derivative());
          } else if constexpr (std::is_same_v<T, Rational>) {
            return quotient_rule(n.num, n.den);
          } else if constexpr (std::is_same_v<T, Blaschke>) {
            // B = N/D with N = prod (z - a), D = prod (1 - conj(a) z)
            Polynomial num = Polynomial::constant(1.0), den = Polynomial::constant(1.0);
            for (cplx a : n.zeros) {
              num = num * Polynomial{-a, 1.0};
              den = den * Polynomial{1.0, -std::conj(a)};
            }
            return quotient_rule(num, den);
          } else if constexpr (std::is_same_v<T, Sum>) {
            return n.a->derivative() + n.b->derivative();
          } else if constexpr (std::is_same_v<T, Product>) {
            return n.a->derivative() * *n.b + *n.a * n.b->derivative();
          } else {
            return n.s * n.a->derivative();
          }
        },
        node_);
  }

  std::string to_string() const {
    return std::visit(
        [](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Poly>) {
            return to_spec_string(n.p);
          } else if constexpr (std::is_same_v<T, Rational>) {
            return "rat:(" + to_spec_string(n.num) + ")/(" + to_spec_string(n.den) + ")";
          } else if constexpr (std::is_same_v<T, Blaschke>) {
            std::string s = "blaschke:";
            for (std::size_t k = 0; k < n.zeros.size(); ++k) s += (k ? ";" : "") + format_complex(n.zeros[k]);
            return s;
          } else if constexpr (std::is_same_v<T, Sum>) {
            return "(" + n.a->to_string() + ")+(" + n.b->to_string() + ")";
          } else if constexpr (std::is_same_v<T, Product>) {
            return "(" + n.a->to_string() + ")*(" + n.b->to_string() + ")";
          } else {
            return format_real(n.s) + "*(" + n.a->to_string() + ")";
          }
        },
        node_);
  }

 private:
  explicit FunctionSpec(Node n) : node_(std::move(n)) {}

  static FunctionSpec quotient_rule(const Polynomial& p, const Polynomial& q) {
    return rational(p.derivative() * q - p * q.derivative(), q * q);
  }

  Node node_;
};

inline FunctionSpec spec_derivative(const FunctionSpec& spec) { return spec.derivative(); }

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) src_.push_back(c);
  }

  FunctionSpec parse_all() {
    if (src_.empty()) fail("empty function spec");
    FunctionSpec s = expr();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return s;
  }

  /// Complex literal: a, bi, a+bi, a-bi, i, -i.
  cplx complex_literal() {
    const std::size_t start = pos_;
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      if (peek() == '-') sign = -1.0;
      ++pos_;
    }
    if (peek() == 'i') {
      ++pos_;
      return {0.0, sign};
    }
    double a = 0.0;
    if (!number(a)) {
      pos_ = start;
      fail("expected a complex literal");
    }
    a *= sign;
    if (peek() == 'i') {
      ++pos_;
      return {0.0, a};
    }
    if (peek() == '+' || peek() == '-') {
      const std::size_t save = pos_;
      const double s2 = peek() == '-' ? -1.0 : 1.0;
      ++pos_;
      if (peek() == 'i') {
        ++pos_;
        return {a, s2};
      }
      double b = 0.0;
      if (number(b) && peek() == 'i') {
        ++pos_;
        return {a, s2 * b};
      }
      pos_ = save;
    }
    return {a, 0.0};
  }

 private:
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const {
    throw CoronaError("function spec '" + src_ + "': " + what + " at position " + std::to_string(pos_));
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool starts_with(std::string_view kw) const { return std::string_view(src_).substr(pos_).starts_with(kw); }

  // Unsigned decimal number; leaves pos_ untouched on failure.
  bool number(double& out) {
    const char c = peek();
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.')) return false;
    const char* begin = src_.c_str() + pos_;
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(out)) return false;
    pos_ += static_cast<std::size_t>(end - begin);
    return true;
  }

  FunctionSpec expr() {
    FunctionSpec acc = term();
    while (peek() == '+') {
      ++pos_;
      acc = acc + term();
    }
    return acc;
  }

  FunctionSpec term() {
    FunctionSpec acc = factor();
    while (peek() == '*') {
      ++pos_;
      acc = acc * factor();
    }
    return acc;
  }

  FunctionSpec factor() {
    const char c = peek();
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double sign = 1.0;
      if (c == '-') {
        sign = -1.0;
        ++pos_;
      }
      double s = 0.0;
      if (!number(s)) {
        // "-poly:..." negates the following factor
        if (sign < 0.0) return -1.0 * factor();
        fail("expected a number");
      }
      s *= sign;
      if (peek() == '*' || peek() == '+' || peek() == ')' || peek() == '\0') {
        return FunctionSpec::constant(s);
      }
      return s * factor();  // prefix without '*', e.g. 2poly:0,1
    }
    if (c == '(') {
      ++pos_;
      FunctionSpec inner = expr();
      expect(')');
      return inner;
    }
    if (starts_with("poly:")) {
      pos_ += 5;
      return FunctionSpec::polynomial(coefficient_list());
    }
    if (starts_with("blaschke:")) {
      pos_ += 9;
      std::vector<cplx> zeros;
      if (peek() != '\0' && peek() != '+' && peek() != '*' && peek() != ')') {
        zeros.push_back(complex_literal());
        while (peek() == ';') {
          ++pos_;
          zeros.push_back(complex_literal());
        }
      }
      return FunctionSpec::blaschke(std::move(zeros));
    }
    if (starts_with("rat:")) {
      pos_ += 4;
      expect('(');
      if (!starts_with("poly:")) fail("rational numerator must be a poly: literal");
      pos_ += 5;
      Polynomial num = coefficient_list();
      expect(')');
      expect('/');
      expect('(');
      if (!starts_with("poly:")) fail("rational denominator must be a poly: literal");
      pos_ += 5;
      Polynomial den = coefficient_list();
      expect(')');
      return FunctionSpec::rational(std::move(num), std::move(den));
    }
    fail("expected poly:, blaschke:, rat:, a number or '('");
  }

  Polynomial coefficient_list() {
    std::vector<cplx> c{complex_literal()};
    while (peek() == ',') {
      ++pos_;
      c.push_back(complex_literal());
    }
    return Polynomial(std::move(c));
  }

  std::string src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline FunctionSpec FunctionSpec::parse(std::string_view text) { return detail::SpecParser(text).parse_all(); }

/// Parses a single complex literal in the `a+bi` syntax.
inline cplx parse_complex(std::string_view text) {
  detail::SpecParser p(text);
  return p.complex_literal();
}

}  // namespace corona
