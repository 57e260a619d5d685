#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hsto/analysis.hpp"
#include "hsto/cli.hpp"
#include "hsto/config.hpp"
#include "hsto/error.hpp"
#include "hsto/snapshot.hpp"
#include "hsto/stepping.hpp"

namespace py = pybind11;
using namespace hsto;

namespace {

py::array_t<double> interior(const Field& f) {
    const Grid& g = f.grid();
    py::array_t<double> a({g.nz(), g.n2(), g.n1()});
    auto v = f.interior_values();
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

py::dict state_dict(const State& U) {
    py::dict d;
    for (Component c : all_components) d[py::str(std::string(to_string(c)))] = interior(U[c]);
    d["time"] = U.time;
    return d;
}

py::dict records_dict(const std::vector<DiagnosticsRecord>& rs) {
    const std::pair<const char*, double DiagnosticsRecord::*> cols[] = {
        {"t", &DiagnosticsRecord::t},           {"l2_U", &DiagnosticsRecord::l2_U},
        {"v_V", &DiagnosticsRecord::v_V},       {"l4_v", &DiagnosticsRecord::l4_v},
        {"l4_T", &DiagnosticsRecord::l4_T},     {"l4_S", &DiagnosticsRecord::l4_S},
        {"l2_dzU", &DiagnosticsRecord::l2_dzU}, {"v_dzU", &DiagnosticsRecord::v_dzU},
        {"l2_AU", &DiagnosticsRecord::l2_AU},   {"int_V2", &DiagnosticsRecord::int_V2},
        {"int_dzV2", &DiagnosticsRecord::int_dzV2}, {"int_AU2", &DiagnosticsRecord::int_AU2},
    };
    py::dict d;
    const auto n = static_cast<py::ssize_t>(rs.size());
    for (const auto& [name, member] : cols) {
        py::array_t<double> a(n);
        for (py::ssize_t i = 0; i < n; ++i) a.mutable_at(i) = rs[i].*member;
        d[name] = a;
    }
    py::array_t<double> gap(n);
    py::array_t<bool> flag(n);
    for (py::ssize_t i = 0; i < n; ++i) {
        gap.mutable_at(i) = rs[i].split_gap.value_or(std::numeric_limits<double>::quiet_NaN());
        flag.mutable_at(i) = rs[i].blowup;
    }
    d["split_gap"] = gap;
    d["blowup_flag"] = flag;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    static py::handle hsto_error = py::exception<Error>(m, "HstoError", PyExc_RuntimeError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = hsto_error(e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(hsto_error.ptr(), exc.ptr());
        }
    });

    m.def("echo_config", [](const std::string& text) { return config_to_toml(parse_config_string(text)); },
          py::arg("text"));

    m.def(
        "run",
        [](const std::string& text) {
            const RunConfig cfg = parse_config_string(text);
            const TrajectoryResult r = [&] {
                py::gil_scoped_release release;
                return run_trajectory(cfg);
            }();
            py::dict d;
            d["records"] = records_dict(r.records);
            d["state"] = state_dict(r.final_state);
            d["blowup"] = r.blowup;
            d["steps_taken"] = r.steps_taken;
            d["max_barotropic_divergence"] = r.max_barotropic_divergence;
            return d;
        },
        py::arg("config_text"));

    m.def(
        "verify",
        [](int N, std::uint64_t seed, int samples) {
            std::vector<VerifyRow> rows;
            {
                py::gil_scoped_release release;
                rows = verify_battery(N, seed, samples);
            }
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["check"] = r.check;
                d["grid_N"] = r.grid_N;
                d["samples"] = r.samples;
                d["statistic"] = r.statistic;
                d["threshold"] = r.threshold;
                d["pass"] = r.pass;
                out.append(d);
            }
            return out;
        },
        py::arg("N") = 16, py::arg("seed") = 0, py::arg("samples") = 100);

    m.def(
        "gronwall_suite",
        [](int count, std::uint64_t seed) {
            const GronwallSuiteReport r = gronwall_suite(count, seed);
            py::dict d;
            d["cases"] = r.cases;
            d["hypothesis_ok"] = r.hypothesis_ok;
            d["conclusion_ok"] = r.conclusion_ok;
            d["max_ratio"] = r.max_ratio;
            return d;
        },
        py::arg("count") = 1000, py::arg("seed") = 0);

    m.def("read_snapshot", [](const std::string& path) { return state_dict(read_snapshot(path)); }, py::arg("path"));

    m.def(
        "cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "hsto");
            std::vector<const char*> argv;
            for (auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
