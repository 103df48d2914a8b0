#pragma once

/**
 * @file polynomial.hpp
 * @brief Multivariate polynomials and rational functions with exact rational coefficients.
 *
 * Variables are numbered 0..nvars-1. In chart coordinates the last variable is
 * the fiber parameter (r, or t for lightlike charts).
 */

#include <gmpxx.h>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace rigidity {

using Exponents = std::vector<int>;

class Polynomial {
public:
    explicit Polynomial(int nvars = 0) : nvars_(nvars) {}

    static Polynomial constant(int nvars, const mpq_class& c);
    static Polynomial variable(int nvars, int index);
    static Polynomial monomial(const mpq_class& c, Exponents e);

    int nvars() const { return nvars_; }
    const std::map<Exponents, mpq_class>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    /// True when no variable appears.
    bool is_constant() const;
    int degree_in(int var) const;

    /// Adds c * x^e. Zero results are dropped.
    void add_term(const Exponents& e, const mpq_class& c);

    Polynomial derivative(int var) const;
    mpq_class evaluate(std::span<const mpq_class> point) const;
    /// Replace variable `var` by the constant c.
    Polynomial substitute(int var, const mpq_class& c) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(const mpq_class& c) const;
    Polynomial operator-() const { return *this * mpq_class(-1); }
    bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

    std::string to_string() const;

private:
    void check_compatible(const Polynomial& o) const;

    int nvars_;
    std::map<Exponents, mpq_class> terms_;
};

class RationalField {
public:
    RationalField() = default;
    /// Throws InvalidInput if the denominator is the zero polynomial or the variable counts differ.
    RationalField(Polynomial num, Polynomial den);
    explicit RationalField(Polynomial num);
    static RationalField zero(int nvars) { return RationalField(Polynomial(nvars)); }

    int nvars() const { return num_.nvars(); }
    const Polynomial& numerator() const { return num_; }
    const Polynomial& denominator() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    /// Exact quotient rule; a constant denominator is kept constant.
    RationalField derivative(int var) const;
    /// Throws InvalidInput if the denominator vanishes at the point.
    mpq_class evaluate(std::span<const mpq_class> point) const;
    mpq_class denominator_at(std::span<const mpq_class> point) const { return den_.evaluate(point); }

    /// Same rational function: num * o.den == o.num * den.
    bool equivalent(const RationalField& o) const;
    bool operator==(const RationalField& o) const { return num_ == o.num_ && den_ == o.den_; }

private:
    Polynomial num_;
    Polynomial den_;
};

/// Exact parse of "-12", "3.25", "1e-3", "2.5E+2" or "p/q". Throws InvalidInput.
mpq_class parse_rational(const std::string& text);
/// Exact value of a finite double.
mpq_class to_rational(double x);
std::vector<mpq_class> to_rational(std::span<const double> xs);

} // namespace rigidity
