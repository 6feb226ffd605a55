#ifndef CSYMP_EXPR_HPP
#define CSYMP_EXPR_HPP

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csymp/scalar.hpp"

namespace csymp {

/// Closed-form coefficient expressions in real coordinates: rational
/// functions of the coordinates and logarithms of rational functions, closed
/// under differentiation and complex conjugation. Constants are Gaussian
/// rationals, so evaluation in the exact backend stays exact and the
/// symbolic zero test below is a decision procedure, not a heuristic.
class Expr {
 public:
    enum class Kind { Const, Var, Add, Mul, Pow, Log };

    Expr() { *this = constant(GaussianRational{}); }

    static Expr constant(GaussianRational v) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Const;
        n->cval = std::move(v);
        n->cval_d = n->cval.to_complex_double();
        return Expr(std::move(n));
    }
    static Expr constant(std::complex<double> z) {
        return constant(GaussianRational::from_complex_double(z));
    }
    static Expr constant(int v) { return constant(GaussianRational(v)); }
    static Expr i() { return constant(GaussianRational::i()); }

    static Expr var(int index) {
        if (index < 0) throw std::invalid_argument("Expr::var: negative index");
        auto n = std::make_shared<Node>();
        n->kind = Kind::Var;
        n->var = index;
        return Expr(std::move(n));
    }

    static Expr add(std::vector<Expr> kids) {
        GaussianRational c;
        std::vector<Expr> flat;
        for (auto& k : kids) {
            if (k.kind() == Kind::Const) {
                c += k.p_->cval;
            } else if (k.kind() == Kind::Add) {
                for (const auto& kk : k.p_->kids) {
                    if (kk.kind() == Kind::Const) c += kk.p_->cval;
                    else flat.push_back(kk);
                }
            } else {
                flat.push_back(std::move(k));
            }
        }
        if (!c.is_zero() || flat.empty()) flat.push_back(constant(c));
        if (flat.size() == 1) return flat[0];
        auto n = std::make_shared<Node>();
        n->kind = Kind::Add;
        n->kids = std::move(flat);
        return Expr(std::move(n));
    }

    static Expr mul(std::vector<Expr> kids) {
        GaussianRational c(1);
        std::vector<Expr> flat;
        for (auto& k : kids) {
            if (k.kind() == Kind::Const) {
                c *= k.p_->cval;
            } else if (k.kind() == Kind::Mul) {
                for (const auto& kk : k.p_->kids) {
                    if (kk.kind() == Kind::Const) c *= kk.p_->cval;
                    else flat.push_back(kk);
                }
            } else {
                flat.push_back(std::move(k));
            }
        }
        if (c.is_zero()) return constant(0);
        if (flat.empty()) return constant(c);
        if (c != GaussianRational(1)) flat.push_back(constant(c));
        if (flat.size() == 1) return flat[0];
        auto n = std::make_shared<Node>();
        n->kind = Kind::Mul;
        n->kids = std::move(flat);
        return Expr(std::move(n));
    }

    Expr pow(int k) const {
        if (k == 0) return constant(1);
        if (k == 1) return *this;
        if (kind() == Kind::Const) {
            GaussianRational base = p_->cval, acc(1);
            int kk = k < 0 ? -k : k;
            if (k < 0) {
                if (base.is_zero()) throw std::domain_error("Expr::pow: division by zero constant");
                base = GaussianRational(1) / base;
            }
            for (int t = 0; t < kk; ++t) acc *= base;
            return constant(acc);
        }
        if (kind() == Kind::Pow) {
            Expr b = p_->kids[0];
            long long prod = static_cast<long long>(p_->expo) * k;
            return b.pow(static_cast<int>(prod));
        }
        auto n = std::make_shared<Node>();
        n->kind = Kind::Pow;
        n->expo = k;
        n->kids = {*this};
        return Expr(std::move(n));
    }

    static Expr log(const Expr& arg) {
        if (arg.kind() == Kind::Const && arg.p_->cval == GaussianRational(1)) return constant(0);
        auto n = std::make_shared<Node>();
        n->kind = Kind::Log;
        n->kids = {arg};
        return Expr(std::move(n));
    }

    friend Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
    friend Expr operator-(const Expr& a, const Expr& b) { return add({a, constant(-1) * b}); }
    friend Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
    friend Expr operator/(const Expr& a, const Expr& b) { return mul({a, b.pow(-1)}); }
    Expr operator-() const { return constant(-1) * (*this); }

    Kind kind() const { return p_->kind; }
    bool is_structural_zero() const {
        return kind() == Kind::Const && p_->cval.is_zero();
    }
    const GaussianRational& const_value() const { return p_->cval; }

    Expr derivative(int v) const {
        switch (kind()) {
            case Kind::Const: return constant(0);
            case Kind::Var: return constant(p_->var == v ? 1 : 0);
            case Kind::Add: {
                std::vector<Expr> parts;
                parts.reserve(p_->kids.size());
                for (const auto& k : p_->kids) parts.push_back(k.derivative(v));
                return add(std::move(parts));
            }
            case Kind::Mul: {
                std::vector<Expr> parts;
                for (size_t i = 0; i < p_->kids.size(); ++i) {
                    std::vector<Expr> factors = p_->kids;
                    factors[i] = p_->kids[i].derivative(v);
                    parts.push_back(mul(std::move(factors)));
                }
                return add(std::move(parts));
            }
            case Kind::Pow: {
                const Expr& b = p_->kids[0];
                return mul({constant(p_->expo), b.pow(p_->expo - 1), b.derivative(v)});
            }
            case Kind::Log: {
                const Expr& u = p_->kids[0];
                return u.derivative(v) / u;
            }
        }
        throw std::logic_error("Expr::derivative: unreachable");
    }

    Expr conjugate() const {
        switch (kind()) {
            case Kind::Const: return constant(p_->cval.conj());
            case Kind::Var: return *this;
            case Kind::Add: {
                std::vector<Expr> parts;
                for (const auto& k : p_->kids) parts.push_back(k.conjugate());
                return add(std::move(parts));
            }
            case Kind::Mul: {
                std::vector<Expr> parts;
                for (const auto& k : p_->kids) parts.push_back(k.conjugate());
                return mul(std::move(parts));
            }
            case Kind::Pow: return p_->kids[0].conjugate().pow(p_->expo);
            // log arguments in this expression class are real-valued, so
            // conjugation passes through the argument.
            case Kind::Log: return log(p_->kids[0].conjugate());
        }
        throw std::logic_error("Expr::conjugate: unreachable");
    }

    /// Evaluate at a point given by real coordinate values.
    template <class S>
    S eval(std::span<const typename ScalarTraits<S>::Real> pt) const {
        using Traits = ScalarTraits<S>;
        switch (kind()) {
            case Kind::Const: {
                if constexpr (Traits::exact) {
                    return p_->cval;
                } else {
                    return p_->cval_d;
                }
            }
            case Kind::Var: {
                if (p_->var >= static_cast<int>(pt.size()))
                    throw std::invalid_argument("Expr::eval: point has too few coordinates");
                return Traits::from_real(pt[p_->var]);
            }
            case Kind::Add: {
                S s = Traits::zero();
                for (const auto& k : p_->kids) s = s + k.eval<S>(pt);
                return s;
            }
            case Kind::Mul: {
                S s = Traits::one();
                for (const auto& k : p_->kids) s = s * k.eval<S>(pt);
                return s;
            }
            case Kind::Pow: {
                S b = p_->kids[0].eval<S>(pt);
                int k = p_->expo;
                if (k < 0) {
                    if (Traits::is_zero(b)) throw std::domain_error("Expr::eval: division by zero");
                    b = Traits::one() / b;
                    k = -k;
                }
                S acc = Traits::one();
                for (int t = 0; t < k; ++t) acc = acc * b;
                return acc;
            }
            case Kind::Log: {
                if constexpr (Traits::exact) {
                    throw std::domain_error("Expr::eval: log is not exactly evaluable in the rational backend");
                } else {
                    return std::log(p_->kids[0].eval<S>(pt));
                }
            }
        }
        throw std::logic_error("Expr::eval: unreachable");
    }

    std::complex<double> eval_d(std::span<const double> pt) const { return eval<ComplexD>(pt); }

    int max_var_index() const {
        int m = -1;
        walk([&m](const Node& n) {
            if (n.kind == Kind::Var) m = std::max(m, n.var);
        });
        return m;
    }

    bool contains_log() const {
        bool found = false;
        walk([&found](const Node& n) {
            if (n.kind == Kind::Log) found = true;
        });
        return found;
    }

    /// Decision procedure for identical vanishing over the expression class:
    /// the expression is brought to a canonical rational-function form in the
    /// coordinates and one transcendental slot per distinct log argument.
    bool is_zero_symbolic() const;

    std::string to_string() const {
        std::ostringstream os;
        print(os);
        return os.str();
    }

 private:
    struct Node {
        Kind kind = Kind::Const;
        GaussianRational cval;
        std::complex<double> cval_d;  // cached float image of cval
        int var = -1;
        int expo = 1;
        std::vector<Expr> kids;
    };

    template <class F>
    void walk(F&& f) const {
        f(*p_);
        for (const auto& k : p_->kids) k.walk(f);
    }

    void print(std::ostream& os) const {
        switch (kind()) {
            case Kind::Const: os << p_->cval.to_string(); break;
            case Kind::Var: os << "x" << p_->var; break;
            case Kind::Add: {
                os << "(";
                for (size_t i = 0; i < p_->kids.size(); ++i) {
                    if (i) os << " + ";
                    p_->kids[i].print(os);
                }
                os << ")";
                break;
            }
            case Kind::Mul: {
                os << "(";
                for (size_t i = 0; i < p_->kids.size(); ++i) {
                    if (i) os << "*";
                    p_->kids[i].print(os);
                }
                os << ")";
                break;
            }
            case Kind::Pow:
                p_->kids[0].print(os);
                os << "^" << p_->expo;
                break;
            case Kind::Log:
                os << "log(";
                p_->kids[0].print(os);
                os << ")";
                break;
        }
    }

    explicit Expr(std::shared_ptr<const Node> n) : p_(std::move(n)) {}

    std::shared_ptr<const Node> p_;

    friend class ExprCanonicalizer;
};

/// Multivariate polynomial over Gaussian rationals with a dense exponent-key
/// map; variables are the coordinates followed by the log slots.
namespace canon {

using Key = std::vector<int>;
using Poly = std::map<Key, GaussianRational>;

inline void poly_add_term(Poly& p, const Key& k, const GaussianRational& c) {
    if (c.is_zero()) return;
    auto it = p.find(k);
    if (it == p.end()) {
        p.emplace(k, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) p.erase(it);
    }
}

inline Poly poly_add(const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [k, c] : b) poly_add_term(r, k, c);
    return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) {
            Key k(ka.size());
            for (size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
            poly_add_term(r, k, ca * cb);
        }
    return r;
}

inline Poly poly_const(const GaussianRational& c, size_t nv) {
    Poly p;
    poly_add_term(p, Key(nv, 0), c);
    return p;
}

inline bool poly_is_one(const Poly& p) {
    if (p.size() != 1) return false;
    const auto& [k, c] = *p.begin();
    for (int e : k)
        if (e != 0) return false;
    return c == GaussianRational(1);
}

/// Exact division a / b; nullopt when b does not divide a. Leading terms in
/// the map's lexicographic key order.
inline std::optional<Poly> poly_div_exact(Poly a, const Poly& b) {
    if (b.empty()) return std::nullopt;
    Poly q;
    const auto& [lbk, lbc] = *b.rbegin();
    int guard = 0;
    while (!a.empty()) {
        if (++guard > 20000) return std::nullopt;
        const auto& [lak, lac] = *a.rbegin();
        Key t(lak.size());
        for (size_t i = 0; i < t.size(); ++i) {
            t[i] = lak[i] - lbk[i];
            if (t[i] < 0) return std::nullopt;
        }
        GaussianRational tc = lac / lbc;
        poly_add_term(q, t, tc);
        for (const auto& [kb, cb] : b) {
            Key k(kb.size());
            for (size_t i = 0; i < k.size(); ++i) k[i] = kb[i] + t[i];
            poly_add_term(a, k, GaussianRational(0) - tc * cb);
        }
    }
    return q;
}

struct RatFn {
    Poly num, den;
};

/// Addition that keeps denominators from compounding when one divides the
/// other (the common case for derivatives of f / g^k expressions).
inline RatFn ratfn_add(const RatFn& x, const RatFn& y) {
    if (x.num.empty()) return y;
    if (y.num.empty()) return x;
    if (x.den == y.den) return {poly_add(x.num, y.num), x.den};
    if (auto q = poly_div_exact(y.den, x.den))
        return {poly_add(poly_mul(x.num, *q), y.num), y.den};
    if (auto q = poly_div_exact(x.den, y.den))
        return {poly_add(x.num, poly_mul(y.num, *q)), x.den};
    return {poly_add(poly_mul(x.num, y.den), poly_mul(y.num, x.den)), poly_mul(x.den, y.den)};
}

inline RatFn ratfn_mul(const RatFn& x, const RatFn& y) {
    RatFn r{poly_mul(x.num, y.num), poly_mul(x.den, y.den)};
    if (!poly_is_one(r.den)) {
        if (auto q = poly_div_exact(r.num, r.den)) {
            size_t nv = r.den.begin()->first.size();
            return {std::move(*q), poly_const(GaussianRational(1), nv)};
        }
    }
    return r;
}

inline bool ratfn_equal(const RatFn& f, const RatFn& g) {
    return poly_mul(f.num, g.den) == poly_mul(g.num, f.den);
}

}  // namespace canon

class ExprCanonicalizer {
 public:
    explicit ExprCanonicalizer(int nvars, int max_logs = 8) : nv_(nvars), max_logs_(max_logs) {}

    canon::RatFn run(const Expr& e) {
        // Pass 1: register all distinct log arguments (they must be log-free).
        collect_logs(e);
        total_ = nv_ + static_cast<int>(log_args_.size());
        return canonize(e);
    }

    int log_count() const { return static_cast<int>(log_args_.size()); }

 private:
    void collect_logs(const Expr& e) {
        const auto& n = *e.p_;
        for (const auto& k : n.kids) collect_logs(k);
        if (n.kind == Expr::Kind::Log) {
            const Expr& arg = n.kids[0];
            if (arg.contains_log())
                throw std::domain_error("Expr: nested logarithms are outside the supported class");
            ExprCanonicalizer sub(nv_, 0);
            sub.total_ = nv_;
            canon::RatFn cf = sub.canonize(arg);
            for (const auto& existing : log_args_)
                if (canon::ratfn_equal(existing, cf)) return;
            if (static_cast<int>(log_args_.size()) >= max_logs_)
                throw std::domain_error("Expr: too many distinct log arguments");
            log_args_.push_back(std::move(cf));
        }
    }

    int log_slot(const canon::RatFn& cf) const {
        for (size_t i = 0; i < log_args_.size(); ++i)
            if (canon::ratfn_equal(log_args_[i], cf)) return static_cast<int>(i);
        throw std::logic_error("Expr: log argument not registered");
    }

    canon::RatFn canonize(const Expr& e) {
        using namespace canon;
        const auto& n = *e.p_;
        const size_t nv = static_cast<size_t>(total_);
        switch (n.kind) {
            case Expr::Kind::Const:
                return {poly_const(n.cval, nv), poly_const(GaussianRational(1), nv)};
            case Expr::Kind::Var: {
                Poly p;
                Key k(nv, 0);
                k[n.var] = 1;
                poly_add_term(p, k, GaussianRational(1));
                return {p, poly_const(GaussianRational(1), nv)};
            }
            case Expr::Kind::Add: {
                RatFn acc{poly_const(GaussianRational(0), nv), poly_const(GaussianRational(1), nv)};
                for (const auto& kid : n.kids) acc = ratfn_add(acc, canonize(kid));
                return acc;
            }
            case Expr::Kind::Mul: {
                RatFn acc{poly_const(GaussianRational(1), nv), poly_const(GaussianRational(1), nv)};
                for (const auto& kid : n.kids) acc = ratfn_mul(acc, canonize(kid));
                return acc;
            }
            case Expr::Kind::Pow: {
                RatFn b = canonize(n.kids[0]);
                int k = n.expo;
                if (k < 0) {
                    std::swap(b.num, b.den);
                    k = -k;
                }
                if (b.den.empty()) throw std::domain_error("Expr: division by an identically zero expression");
                RatFn acc{poly_const(GaussianRational(1), nv), poly_const(GaussianRational(1), nv)};
                for (int t = 0; t < k; ++t) acc = ratfn_mul(acc, b);
                return acc;
            }
            case Expr::Kind::Log: {
                ExprCanonicalizer sub(nv_, 0);
                sub.total_ = nv_;
                canon::RatFn argfn = sub.canonize(n.kids[0]);
                int slot = log_slot(argfn);
                Poly p;
                Key k(nv, 0);
                k[static_cast<size_t>(nv_) + slot] = 1;
                poly_add_term(p, k, GaussianRational(1));
                return {p, poly_const(GaussianRational(1), nv)};
            }
        }
        throw std::logic_error("Expr: unreachable canonize");
    }

    int nv_;
    int max_logs_;
    int total_ = 0;
    std::vector<canon::RatFn> log_args_;
};

inline bool Expr::is_zero_symbolic() const {
    int nv = max_var_index() + 1;
    ExprCanonicalizer c(nv);
    canon::RatFn f = c.run(*this);
    if (f.den.empty()) throw std::domain_error("Expr: division by an identically zero expression");
    return f.num.empty();
}

}  // namespace csymp

#endif  // CSYMP_EXPR_HPP
