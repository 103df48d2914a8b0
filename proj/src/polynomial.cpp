#include "rigidity/polynomial.hpp"

#include "rigidity/errors.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace rigidity {

Polynomial Polynomial::constant(int nvars, const mpq_class& c) {
    Polynomial p(nvars);
    p.add_term(Exponents(static_cast<std::size_t>(nvars), 0), c);
    return p;
}

Polynomial Polynomial::variable(int nvars, int index) {
    if (index < 0 || index >= nvars) throw InvalidInput("Polynomial::variable: index out of range");
    Exponents e(static_cast<std::size_t>(nvars), 0);
    e[static_cast<std::size_t>(index)] = 1;
    Polynomial p(nvars);
    p.add_term(e, mpq_class(1));
    return p;
}

Polynomial Polynomial::monomial(const mpq_class& c, Exponents e) {
    Polynomial p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
}

bool Polynomial::is_constant() const {
    for (const auto& [e, c] : terms_)
        for (int k : e)
            if (k != 0) return false;
    return true;
}

int Polynomial::degree_in(int var) const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[static_cast<std::size_t>(var)]);
    return d;
}

void Polynomial::add_term(const Exponents& e, const mpq_class& c) {
    if (static_cast<int>(e.size()) != nvars_) throw InvalidInput("Polynomial: exponent vector has the wrong length");
    for (int k : e)
        if (k < 0) throw InvalidInput("Polynomial: negative exponent");
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
        return;
    }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
}

Polynomial Polynomial::derivative(int var) const {
    if (var < 0 || var >= nvars_) throw InvalidInput("Polynomial::derivative: variable out of range");
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
        const int k = e[static_cast<std::size_t>(var)];
        if (k == 0) continue;
        Exponents f = e;
        f[static_cast<std::size_t>(var)] = k - 1;
        out.add_term(f, c * k);
    }
    return out;
}

mpq_class Polynomial::evaluate(std::span<const mpq_class> point) const {
    if (static_cast<int>(point.size()) != nvars_) throw InvalidInput("Polynomial::evaluate: point has the wrong length");
    mpq_class sum = 0;
    for (const auto& [e, c] : terms_) {
        mpq_class term = c;
        for (int v = 0; v < nvars_; ++v)
            for (int k = 0; k < e[static_cast<std::size_t>(v)]; ++k) term *= point[static_cast<std::size_t>(v)];
        sum += term;
    }
    return sum;
}

Polynomial Polynomial::substitute(int var, const mpq_class& c) const {
    Polynomial out(nvars_);
    for (const auto& [e, coef] : terms_) {
        mpq_class factor = coef;
        for (int k = 0; k < e[static_cast<std::size_t>(var)]; ++k) factor *= c;
        Exponents f = e;
        f[static_cast<std::size_t>(var)] = 0;
        out.add_term(f, factor);
    }
    return out;
}

void Polynomial::check_compatible(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw InvalidInput("Polynomial: variable counts differ");
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    check_compatible(o);
    Polynomial out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, c);
    return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    check_compatible(o);
    Polynomial out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
    return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    check_compatible(o);
    Polynomial out(nvars_);
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) {
            Exponents e(e1.size());
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = e1[i] + e2[i];
            out.add_term(e, c1 * c2);
        }
    return out;
}

Polynomial Polynomial::operator*(const mpq_class& c) const {
    Polynomial out(nvars_);
    for (const auto& [e, coef] : terms_) out.add_term(e, coef * c);
    return out;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c.get_str();
        for (int v = 0; v < nvars_; ++v) {
            const int k = e[static_cast<std::size_t>(v)];
            if (k == 0) continue;
            os << "*v" << v;
            if (k > 1) os << "^" << k;
        }
    }
    return os.str();
}

RationalField::RationalField(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (num_.nvars() != den_.nvars()) throw InvalidInput("RationalField: numerator and denominator variable counts differ");
    if (den_.is_zero()) throw InvalidInput("RationalField: denominator is identically zero");
}

RationalField::RationalField(Polynomial num)
    : num_(std::move(num)), den_(Polynomial::constant(num_.nvars(), mpq_class(1))) {}

RationalField RationalField::derivative(int var) const {
    if (den_.is_constant()) return RationalField(num_.derivative(var), den_);
    return RationalField(num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_);
}

mpq_class RationalField::evaluate(std::span<const mpq_class> point) const {
    const mpq_class d = den_.evaluate(point);
    if (d == 0) throw InvalidInput("RationalField: denominator vanishes at the evaluation point");
    return num_.evaluate(point) / d;
}

bool RationalField::equivalent(const RationalField& o) const {
    if (nvars() != o.nvars()) return false;
    return num_ * o.den_ == o.num_ * den_;
}

mpq_class parse_rational(const std::string& text) {
    const auto fail = [&]() -> mpq_class { throw InvalidInput("cannot parse \"" + text + "\" as an exact rational"); };
    if (text.empty()) return fail();

    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const std::string p = text.substr(0, slash), q = text.substr(slash + 1);
        const auto integer = [](const std::string& s, bool allow_sign) {
            std::size_t i = 0;
            if (allow_sign && i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
            if (i == s.size()) return false;
            for (; i < s.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
            return true;
        };
        if (!integer(p, true) || !integer(q, false)) return fail();
        mpz_class num(p[0] == '+' ? p.substr(1) : p, 10), den(q, 10);
        if (den == 0) return fail();
        mpq_class out(num, den);
        out.canonicalize();
        return out;
    }

    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '-' || text[i] == '+') negative = text[i++] == '-';
    std::string digits;
    long scale = 0;
    bool any = false, point = false;
    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits.push_back(ch);
            any = true;
            if (point) ++scale;
        } else if (ch == '.' && !point) {
            point = true;
        } else {
            break;
        }
    }
    if (!any) return fail();
    long exponent = 0;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') return fail();
        ++i;
        bool eneg = false;
        if (i < text.size() && (text[i] == '-' || text[i] == '+')) eneg = text[i++] == '-';
        if (i == text.size()) return fail();
        for (; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i])) || exponent > 100000) return fail();
            exponent = exponent * 10 + (text[i] - '0');
        }
        if (eneg) exponent = -exponent;
    }
    mpz_class mantissa(digits, 10);
    if (negative) mantissa = -mantissa;
    const long power = exponent - scale;
    mpz_class ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(power < 0 ? -power : power));
    mpq_class out = power >= 0 ? mpq_class(mantissa * ten_pow) : mpq_class(mantissa, ten_pow);
    out.canonicalize();
    return out;
}

mpq_class to_rational(double x) {
    if (!std::isfinite(x)) throw InvalidInput("non-finite coordinate");
    return mpq_class(x);
}

std::vector<mpq_class> to_rational(std::span<const double> xs) {
    std::vector<mpq_class> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(to_rational(x));
    return out;
}

} // namespace rigidity
