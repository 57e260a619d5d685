#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsto/grid.hpp"
#include "hsto/operators.hpp"

namespace hsto {

// --- vertical-derivative norms ------------------------------------------------
//
// dz f lives on the interior horizontal faces between levels k and k+1; the top
// and bottom faces carry the homogeneous Neumann value 0.

/// |dz f|^2 over the interior faces.
double dz_l2_squared(const Field& f);
/// ((dz f, dz f)) with the component coefficients; ghosts of f must be filled.
double dz_v_squared(const Field& f, Diffusivity coef);

/// Instantaneous norms of one state.
struct InstantNorms {
    double l2_U = 0.0;    // |U|
    double v_V = 0.0;     // ||U||
    double l4_v = 0.0;    // |v|_{L4}
    double l4_T = 0.0;
    double l4_S = 0.0;
    double l2_dzU = 0.0;  // |dz U|
    double v_dzU = 0.0;   // ||dz U||
    double l2_AU = 0.0;   // |AU|
    double l2_dzv = 0.0;  // |dz v|, velocity only
    double v_dzv = 0.0;   // ||dz v||, velocity only
};

/// Computes every norm; requires a BC-applied state.
InstantNorms measure(const State& U, const PhysParams& params);

struct DiagnosticsRecord {
    double t = 0.0;
    double l2_U = 0.0;
    double v_V = 0.0;
    double l4_v = 0.0;
    double l4_T = 0.0;
    double l4_S = 0.0;
    double l2_dzU = 0.0;
    double v_dzU = 0.0;
    double l2_AU = 0.0;
    double int_V2 = 0.0;    // int ||U||^2
    double int_dzV2 = 0.0;  // int ||dz U||^2
    double int_AU2 = 0.0;   // int |AU|^2
    std::optional<double> split_gap;
    bool blowup = false;
    std::string offending;  // first non-finite quantity, or the ceiling criterion

    // Quantities of the remaining stopping times; not part of the CSV.
    double l2_dzv = 0.0;
    double int_dzv2 = 0.0;  // int ||dz v||^2
    double int_F2 = 0.0;    // int |F|_{L4}^2
};

/// Running time integrals and the time stamp carried alongside a state.
struct RecordExtras {
    double t = 0.0;
    double int_V2 = 0.0;
    double int_dzV2 = 0.0;
    double int_AU2 = 0.0;
    double int_dzv2 = 0.0;
    double int_F2 = 0.0;
    std::optional<double> split_gap;
};

/// One record; flags the first non-finite field or norm by name.
DiagnosticsRecord record(const State& U, const PhysParams& params, const RecordExtras& extras = {});

/// Trapezoid accumulation of the running integrals over every step, with blow-up detection.
///
/// The blow-up criterion sup ||U||^2 + int |AU|^2 > ceiling * max(initial ||U||^2, 1)
/// or any non-finite value.
class Monitor {
public:
    Monitor(const PhysParams& params, double F_l4, double ceiling = 1e12);

    /// Observes the state at time t; the first call sets the initial scale.
    void observe(const State& U, double t);
    DiagnosticsRecord current(std::optional<double> split_gap = std::nullopt) const;
    bool blown_up() const { return blowup_; }

private:
    PhysParams params_;
    double F_l4_sq_;
    double ceiling_;
    bool started_ = false;
    bool blowup_ = false;
    std::string offending_;
    double scale_ = 1.0;
    double sup_V2_ = 0.0;
    double last_t_ = 0.0;
    InstantNorms last_{};
    RecordExtras acc_{};
};

/// Exact CSV header, no trailing newline.
std::string_view csv_header();
void write_csv_header(std::ostream& out);
/// Shortest round-trip formatting; split_gap is an empty field when absent.
void write_csv_row(std::ostream& out, const DiagnosticsRecord& r);

// --- stopping times -------------------------------------------------------------

struct StoppingHits {
    double K = 0.0;
    std::optional<double> tau_W;
    std::optional<double> tau_1;
    std::optional<double> tau_2;
    std::optional<double> tau_z;
    std::optional<double> tau_T;
    std::optional<double> tau;    // tau_1 ^ tau_2
    std::optional<double> tau_M;  // tau_z ^ tau_T ^ tau_1
};

struct StoppingReport {
    std::vector<StoppingHits> hits;  // one per K, in the order given
};

/// First record time at which each exit functional reaches K. Throws unsorted_series.
StoppingReport stopping_times(std::span<const DiagnosticsRecord> series, std::span<const double> K_list);

// --- ensemble statistics -----------------------------------------------------------

struct MomentReport {
    double p = 2.0;
    int runs = 0;
    double sup_moment = 0.0;  // E(sup|U|^p + int ||U||^2 |U|^{p-2})
    double sup_moment_se = 0.0;
    double int_moment = 0.0;  // E(int ||U||^2)^{p/2}
    double int_moment_se = 0.0;
};

/// Monte-Carlo means and standard errors over runs sharing a config. Throws empty_set.
MomentReport ensemble_stats(std::span<const std::vector<DiagnosticsRecord>> runs, double p);

} // namespace hsto
