#include "hsto/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "hsto/error.hpp"

namespace hsto {

double dz_l2_squared(const Field& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int k = 0; k + 1 < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j)
            for (int i = 0; i < g.n1(); ++i) {
                const double d = f(i, j, k + 1) - f(i, j, k);
                s += d * d;
            }
    return s / (g.dz() * g.dz()) * g.cell_volume();
}

double dz_v_squared(const Field& f, Diffusivity coef) {
    const Grid& g = f.grid();
    const int N1 = g.n1(), N2 = g.n2(), Nz = g.nz();
    const double inv_dz = 1.0 / g.dz();
    auto a = [&](int i, int j, int m) {  // dz f on face m + 1/2, zero on the top and bottom faces
        if (m < 0 || m >= Nz - 1) return 0.0;
        return (f(i, j, m + 1) - f(i, j, m)) * inv_dz;
    };
    double sx = 0.0, sy = 0.0, sz = 0.0;
    for (int m = 0; m < Nz - 1; ++m) {
        for (int j = 0; j < N2; ++j)
            for (int i = -1; i < N1; ++i) {
                const double w = (i == -1 || i == N1 - 1) ? 0.5 : 1.0;
                const double d = a(i + 1, j, m) - a(i, j, m);
                sx += w * d * d;
            }
        for (int j = -1; j < N2; ++j)
            for (int i = 0; i < N1; ++i) {
                const double w = (j == -1 || j == N2 - 1) ? 0.5 : 1.0;
                const double d = a(i, j + 1, m) - a(i, j, m);
                sy += w * d * d;
            }
    }
    for (int m = 0; m < Nz; ++m)
        for (int j = 0; j < N2; ++j)
            for (int i = 0; i < N1; ++i) {
                const double d = a(i, j, m) - a(i, j, m - 1);
                sz += d * d;
            }
    return (coef.mu * (sx / (g.dx1() * g.dx1()) + sy / (g.dx2() * g.dx2())) +
            coef.nu * sz / (g.dz() * g.dz())) *
           g.cell_volume();
}

InstantNorms measure(const State& U, const PhysParams& params) {
    InstantNorms n;
    n.l2_U = norm(U, NormKind::l2());
    n.v_V = norm(U, NormKind::h1(), params);
    n.l4_v = velocity_norm(U, NormKind::lp(4.0));
    n.l4_T = norm(U.T, NormKind::lp(4.0));
    n.l4_S = norm(U.S, NormKind::lp(4.0));
    double dz2 = 0.0, dzv2 = 0.0, vel2 = 0.0, velv = 0.0;
    for (Component c : all_components) {
        const double l = dz_l2_squared(U[c]);
        const double v = dz_v_squared(U[c], params.diffusivity(c));
        dz2 += l;
        dzv2 += v;
        if (is_velocity(c)) {
            vel2 += l;
            velv += v;
        }
    }
    n.l2_dzU = std::sqrt(dz2);
    n.v_dzU = std::sqrt(dzv2);
    n.l2_dzv = std::sqrt(vel2);
    n.v_dzv = std::sqrt(velv);
    const Tendency AU = apply_A(U, params);
    n.l2_AU = norm(as_state(AU), NormKind::l2());
    return n;
}

namespace {

std::string first_non_finite(const State& U, const InstantNorms& n) {
    for (Component c : all_components)
        if (!U[c].interior_finite()) return std::string(to_string(c));
    const std::pair<const char*, double> named[] = {
        {"l2_U", n.l2_U},     {"v_V", n.v_V},       {"l4_v", n.l4_v}, {"l4_T", n.l4_T},
        {"l4_S", n.l4_S},     {"l2_dzU", n.l2_dzU}, {"v_dzU", n.v_dzU}, {"l2_AU", n.l2_AU},
    };
    for (const auto& [name, value] : named)
        if (!std::isfinite(value)) return name;
    return {};
}

DiagnosticsRecord make_record(const InstantNorms& n, const RecordExtras& e) {
    DiagnosticsRecord r;
    r.t = e.t;
    r.l2_U = n.l2_U;
    r.v_V = n.v_V;
    r.l4_v = n.l4_v;
    r.l4_T = n.l4_T;
    r.l4_S = n.l4_S;
    r.l2_dzU = n.l2_dzU;
    r.v_dzU = n.v_dzU;
    r.l2_AU = n.l2_AU;
    r.int_V2 = e.int_V2;
    r.int_dzV2 = e.int_dzV2;
    r.int_AU2 = e.int_AU2;
    r.split_gap = e.split_gap;
    r.l2_dzv = n.l2_dzv;
    r.int_dzv2 = e.int_dzv2;
    r.int_F2 = e.int_F2;
    return r;
}

} // namespace

DiagnosticsRecord record(const State& U, const PhysParams& params, const RecordExtras& extras) {
    const InstantNorms n = measure(U, params);
    DiagnosticsRecord r = make_record(n, extras);
    r.offending = first_non_finite(U, n);
    r.blowup = !r.offending.empty();
    return r;
}

Monitor::Monitor(const PhysParams& params, double F_l4, double ceiling)
    : params_(params), F_l4_sq_(F_l4 * F_l4), ceiling_(ceiling) {}

void Monitor::observe(const State& U, double t) {
    const InstantNorms n = measure(U, params_);
    if (started_) {
        const double dt = t - last_t_;
        acc_.int_V2 += 0.5 * dt * (last_.v_V * last_.v_V + n.v_V * n.v_V);
        acc_.int_dzV2 += 0.5 * dt * (last_.v_dzU * last_.v_dzU + n.v_dzU * n.v_dzU);
        acc_.int_AU2 += 0.5 * dt * (last_.l2_AU * last_.l2_AU + n.l2_AU * n.l2_AU);
        acc_.int_dzv2 += 0.5 * dt * (last_.v_dzv * last_.v_dzv + n.v_dzv * n.v_dzv);
        acc_.int_F2 += dt * F_l4_sq_;
    } else {
        scale_ = std::max(n.v_V * n.v_V, 1.0);
        started_ = true;
    }
    acc_.t = t;
    last_t_ = t;
    last_ = n;
    sup_V2_ = std::max(sup_V2_, n.v_V * n.v_V);
    if (!blowup_) {
        offending_ = first_non_finite(U, n);
        if (offending_.empty() && !(sup_V2_ + acc_.int_AU2 <= ceiling_ * scale_)) {
            offending_ = "ceiling";
        }
        blowup_ = !offending_.empty();
    }
}

DiagnosticsRecord Monitor::current(std::optional<double> split_gap) const {
    RecordExtras e = acc_;
    e.split_gap = split_gap;
    DiagnosticsRecord r = make_record(last_, e);
    r.blowup = blowup_;
    r.offending = offending_;
    return r;
}

// ---------------------------------------------------------------------------

std::string_view csv_header() {
    return "t,l2_U,v_V,l4_v,l4_T,l4_S,l2_dzU,v_dzU,l2_AU,int_V2,int_dzV2,int_AU2,split_gap,blowup_flag";
}

void write_csv_header(std::ostream& out) { out << csv_header() << '\n'; }

namespace {

void put(std::ostream& out, double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.write(buf, res.ptr - buf);
}

} // namespace

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
    const double cols[] = {r.t,      r.l2_U,   r.v_V,   r.l4_v,     r.l4_T,     r.l4_S,
                           r.l2_dzU, r.v_dzU,  r.l2_AU, r.int_V2,   r.int_dzV2, r.int_AU2};
    for (double x : cols) {
        put(out, x);
        out << ',';
    }
    if (r.split_gap) put(out, *r.split_gap);
    out << ',' << (r.blowup ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------------------

StoppingReport stopping_times(std::span<const DiagnosticsRecord> series, std::span<const double> K_list) {
    for (std::size_t n = 1; n < series.size(); ++n)
        if (!(series[n].t >= series[n - 1].t)) {
            throw Error(ErrorKind::unsorted_series,
                        "diagnostics series is not time-ordered at record " + std::to_string(n));
        }
    StoppingReport rep;
    for (double K : K_list) {
        StoppingHits h;
        h.K = K;
        double sup_l2 = 0.0, sup_l4 = 0.0, sup_dz = 0.0, sup_dzv = 0.0, sup_TS = 0.0;
        auto hit = [K](std::optional<double>& slot, double value, double t) {
            if (!slot && !(value < K)) slot = t;
        };
        for (const DiagnosticsRecord& r : series) {
            sup_l2 = std::max(sup_l2, r.l2_U * r.l2_U);
            sup_l4 = std::max(sup_l4, std::pow(r.l4_v, 4));
            sup_dz = std::max(sup_dz, r.l2_dzU * r.l2_dzU);
            sup_dzv = std::max(sup_dzv, r.l2_dzv * r.l2_dzv);
            sup_TS = std::max(sup_TS, std::pow(r.l4_T, 4) + std::pow(r.l4_S, 4));
            const bool bad = r.blowup;
            hit(h.tau_W, bad ? K : sup_l2 + r.int_V2 + r.int_F2, r.t);
            hit(h.tau_1, bad ? K : sup_l4, r.t);
            hit(h.tau_2, bad ? K : sup_dz + r.int_dzV2, r.t);
            hit(h.tau_z, bad ? K : sup_dzv + r.int_dzv2, r.t);
            hit(h.tau_T, bad ? K : sup_TS, r.t);
        }
        auto meet = [](std::initializer_list<std::optional<double>> xs) {
            std::optional<double> m;
            for (const auto& x : xs)
                if (x && (!m || *x < *m)) m = x;
            return m;
        };
        h.tau = meet({h.tau_1, h.tau_2});
        h.tau_M = meet({h.tau_z, h.tau_T, h.tau_1});
        rep.hits.push_back(h);
    }
    return rep;
}

MomentReport ensemble_stats(std::span<const std::vector<DiagnosticsRecord>> runs, double p) {
    if (runs.empty()) throw Error(ErrorKind::empty_set, "ensemble statistics need at least one run");
    if (!(p >= 2.0)) throw Error(ErrorKind::invalid_value, "moment exponent p must be >= 2");
    MomentReport rep;
    rep.p = p;
    rep.runs = static_cast<int>(runs.size());
    std::vector<double> xs, ys;
    for (const auto& series : runs) {
        if (series.empty()) throw Error(ErrorKind::empty_set, "ensemble member has no records");
        double sup = 0.0, integral = 0.0;
        for (std::size_t n = 0; n < series.size(); ++n) {
            const DiagnosticsRecord& r = series[n];
            sup = std::max(sup, std::pow(r.l2_U, p));
            if (n > 0) {
                const DiagnosticsRecord& q = series[n - 1];
                const double a = q.v_V * q.v_V * std::pow(q.l2_U, p - 2.0);
                const double b = r.v_V * r.v_V * std::pow(r.l2_U, p - 2.0);
                integral += 0.5 * (r.t - q.t) * (a + b);
            }
        }
        xs.push_back(sup + integral);
        ys.push_back(std::pow(series.back().int_V2, 0.5 * p));
    }
    auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
        const double n = static_cast<double>(v.size());
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        if (v.size() < 2) {
            se = 0.0;
            return;
        }
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        se = std::sqrt(ss / (n - 1.0) / n);
    };
    mean_se(xs, rep.sup_moment, rep.sup_moment_se);
    mean_se(ys, rep.int_moment, rep.int_moment_se);
    return rep;
}

} // namespace hsto
