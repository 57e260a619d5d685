#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "hsto/error.hpp"

namespace hsto {

struct CgOptions {
    double tol = 1e-10;   // relative to |rhs|
    int max_iter = 1000;
    bool keep_history = false;
};

struct CgResult {
    int iterations = 0;
    double residual = 0.0;  // final |r| / |rhs|
    std::vector<double> history;  // |r_k| / |rhs| per iteration, when requested
};

/// Unpreconditioned conjugate gradient for a symmetric positive (semi-)definite operator.
///
/// `apply(x, y)` computes y = A x and may refresh ghost values of x, `dot(a, b)`
/// is the inner product, and
/// `deflate(r)` removes the null-space component of a residual (use a no-op for
/// definite systems). Vector must provide axpy(a, x) (y += a x) and xpay(a, x)
/// (y = x + a y). Throws solver_divergence when max_iter is reached first.
template <class Vector, class Apply, class Dot, class Deflate>
CgResult conjugate_gradient(const Apply& apply, const Vector& rhs, Vector& x, const CgOptions& opt,
                            const Dot& dot, const Deflate& deflate) {
    CgResult result;
    Vector r = rhs;
    deflate(r);
    const double rhs_norm = std::sqrt(dot(r, r));
    if (rhs_norm == 0.0) {
        x *= 0.0;
        return result;
    }

    Vector q = x;
    apply(x, q);
    r.axpy(-1.0, q);
    deflate(r);
    Vector p = r;
    double rr = dot(r, r);
    result.residual = std::sqrt(rr) / rhs_norm;
    if (opt.keep_history) result.history.push_back(result.residual);

    while (result.residual > opt.tol) {
        if (result.iterations >= opt.max_iter) {
            std::ostringstream msg;
            msg << "conjugate gradient hit the iteration cap " << opt.max_iter
                << " with relative residual " << result.residual;
            throw Error(ErrorKind::solver_divergence, msg.str());
        }
        apply(p, q);
        const double alpha = rr / dot(p, q);
        x.axpy(alpha, p);
        r.axpy(-alpha, q);
        deflate(r);
        const double rr_new = dot(r, r);
        ++result.iterations;
        result.residual = std::sqrt(rr_new) / rhs_norm;
        if (opt.keep_history) result.history.push_back(result.residual);
        p.xpay(rr_new / rr, r);
        rr = rr_new;
    }
    return result;
}

/// Conjugate residual method for the same operators as conjugate_gradient.
///
/// Minimizes |r| over the Krylov space, so the residual norm never increases.
/// One operator application per iteration; `apply` output is deflated as well.
template <class Vector, class Apply, class Dot, class Deflate>
CgResult conjugate_residual(const Apply& apply, const Vector& rhs, Vector& x, const CgOptions& opt,
                            const Dot& dot, const Deflate& deflate) {
    CgResult result;
    Vector r = rhs;
    deflate(r);
    const double rhs_norm = std::sqrt(dot(r, r));
    if (rhs_norm == 0.0) {
        x *= 0.0;
        return result;
    }

    Vector Ar = x;
    apply(x, Ar);
    r.axpy(-1.0, Ar);
    deflate(r);
    apply(r, Ar);
    deflate(Ar);
    Vector p = r, Ap = Ar;
    double rAr = dot(r, Ar);
    result.residual = std::sqrt(dot(r, r)) / rhs_norm;
    if (opt.keep_history) result.history.push_back(result.residual);

    while (result.residual > opt.tol) {
        if (result.iterations >= opt.max_iter) {
            std::ostringstream msg;
            msg << "conjugate residual hit the iteration cap " << opt.max_iter
                << " with relative residual " << result.residual;
            throw Error(ErrorKind::solver_divergence, msg.str());
        }
        const double alpha = rAr / dot(Ap, Ap);
        x.axpy(alpha, p);
        r.axpy(-alpha, Ap);
        deflate(r);
        apply(r, Ar);
        deflate(Ar);
        const double rAr_new = dot(r, Ar);
        ++result.iterations;
        result.residual = std::sqrt(dot(r, r)) / rhs_norm;
        if (opt.keep_history) result.history.push_back(result.residual);
        const double beta = rAr_new / rAr;
        p.xpay(beta, r);
        Ap.xpay(beta, Ar);
        rAr = rAr_new;
    }
    return result;
}

} // namespace hsto
