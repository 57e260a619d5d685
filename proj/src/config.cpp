#include "hsto/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "hsto/error.hpp"

namespace hsto {

std::string_view to_string(NoiseTarget target) {
    switch (target) {
    case NoiseTarget::all: return "all";
    case NoiseTarget::velocity: return "velocity";
    case NoiseTarget::tracer: return "tracer";
    case NoiseTarget::T: return "T";
    }
    return "?";
}

NoiseTarget parse_noise_target(std::string_view name) {
    if (name == "all") return NoiseTarget::all;
    if (name == "velocity") return NoiseTarget::velocity;
    if (name == "tracer") return NoiseTarget::tracer;
    if (name == "T") return NoiseTarget::T;
    throw Error(ErrorKind::invalid_value, "[noise].target must be one of all, velocity, tracer, T");
}

namespace {

class Section {
public:
    Section(const toml::table& root, std::string name) : name_(std::move(name)) {
        if (const toml::node* n = root.get(name_)) {
            table_ = n->as_table();
            if (!table_) throw Error(ErrorKind::invalid_value, "[" + name_ + "] must be a table");
        }
    }

    std::string key(std::string_view k) const { return "[" + name_ + "]." + std::string(k); }

    const toml::node* find(std::string_view k) {
        seen_.insert(std::string(k));
        return table_ ? table_->get(k) : nullptr;
    }

    void real(std::string_view k, double& out) {
        const toml::node* n = find(k);
        if (!n) return;
        if (auto v = n->value_exact<double>()) out = *v;
        else if (auto i = n->value_exact<std::int64_t>()) out = static_cast<double>(*i);
        else throw Error(ErrorKind::invalid_value, key(k) + " must be a number");
        if (!std::isfinite(out)) throw Error(ErrorKind::invalid_value, key(k) + " must be finite");
    }

    void integer(std::string_view k, int& out) {
        std::int64_t v = out;
        if (wide(k, v)) {
            if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
                throw Error(ErrorKind::invalid_value, key(k) + " is out of range");
            out = static_cast<int>(v);
        }
    }

    bool wide(std::string_view k, std::int64_t& out) {
        const toml::node* n = find(k);
        if (!n) return false;
        auto v = n->value_exact<std::int64_t>();
        if (!v) throw Error(ErrorKind::invalid_value, key(k) + " must be an integer");
        out = *v;
        return true;
    }

    void seed(std::string_view k, std::uint64_t& out, bool required) {
        std::int64_t v = 0;
        if (!wide(k, v)) {
            if (required) throw Error(ErrorKind::invalid_value, key(k) + " is required");
            return;
        }
        if (v < 0) throw Error(ErrorKind::invalid_value, key(k) + " must be >= 0");
        out = static_cast<std::uint64_t>(v);
    }

    void boolean(std::string_view k, bool& out) {
        const toml::node* n = find(k);
        if (!n) return;
        auto v = n->value_exact<bool>();
        if (!v) throw Error(ErrorKind::invalid_value, key(k) + " must be true or false");
        out = *v;
    }

    std::optional<std::string> text(std::string_view k) {
        const toml::node* n = find(k);
        if (!n) return std::nullopt;
        auto v = n->value_exact<std::string>();
        if (!v) throw Error(ErrorKind::invalid_value, key(k) + " must be a string");
        return *v;
    }

    void reals(std::string_view k, std::vector<double>& out) {
        const toml::node* n = find(k);
        if (!n) return;
        const toml::array* arr = n->as_array();
        if (!arr) throw Error(ErrorKind::invalid_value, key(k) + " must be an array of numbers");
        out.clear();
        for (const toml::node& e : *arr) {
            if (auto v = e.value_exact<double>()) out.push_back(*v);
            else if (auto i = e.value_exact<std::int64_t>()) out.push_back(static_cast<double>(*i));
            else throw Error(ErrorKind::invalid_value, key(k) + " must be an array of numbers");
            if (!std::isfinite(out.back())) throw Error(ErrorKind::invalid_value, key(k) + " entries must be finite");
        }
    }

    void finish() const {
        if (!table_) return;
        for (const auto& [k, v] : *table_) {
            if (!seen_.count(std::string(k.str()))) {
                throw Error(ErrorKind::unknown_key, "unknown key " + key(k.str()));
            }
        }
    }

private:
    std::string name_;
    const toml::table* table_ = nullptr;
    std::set<std::string> seen_;
};

RunConfig from_table(const toml::table& root) {
    static const std::set<std::string> sections{"grid", "physics", "noise", "forcing", "run", "output"};
    for (const auto& [k, v] : root) {
        if (!sections.count(std::string(k.str()))) {
            throw Error(ErrorKind::unknown_key, "unknown section [" + std::string(k.str()) + "]");
        }
    }
    RunConfig c;

    Section grid(root, "grid");
    grid.real("L1", c.grid.L1);
    grid.real("L2", c.grid.L2);
    grid.real("h", c.grid.h);
    for (auto [name, slot] : {std::pair{"N1", &c.grid.N1}, {"N2", &c.grid.N2}, {"Nz", &c.grid.Nz}}) {
        if (!grid.find(name)) throw Error(ErrorKind::invalid_value, grid.key(name) + " is required");
        grid.integer(name, *slot);
        if (*slot < 2) throw Error(ErrorKind::invalid_value, grid.key(name) + " must be >= 2");
    }
    for (auto [name, v] : {std::pair{"L1", c.grid.L1}, {"L2", c.grid.L2}, {"h", c.grid.h}}) {
        if (!(v > 0)) throw Error(ErrorKind::invalid_value, grid.key(name) + " must be > 0");
    }
    grid.finish();

    Section ph(root, "physics");
    PhysParams& p = c.physics;
    ph.real("mu_v", p.mu_v);
    ph.real("nu_v", p.nu_v);
    ph.real("mu_T", p.mu_T);
    ph.real("nu_T", p.nu_T);
    ph.real("mu_S", p.mu_S);
    ph.real("nu_S", p.nu_S);
    ph.real("f", p.f);
    ph.real("g", p.g);
    ph.real("rho0", p.rho0);
    ph.real("beta_T", p.beta_T);
    ph.real("beta_S", p.beta_S);
    ph.real("T_r", p.T_r);
    ph.real("S_r", p.S_r);
    ph.boolean("advection", p.advection);
    ph.finish();

    Section no(root, "noise");
    if (auto s = no.text("kind")) c.noise.kind = parse_noise_kind(*s);
    no.integer("K", c.noise.K);
    no.real("amplitude", c.noise.amplitude);
    if (auto s = no.text("target")) c.noise.target = parse_noise_target(*s);
    no.reals("amplitudes", c.noise.amplitudes);
    no.finish();
    if (c.noise.amplitudes.size() > static_cast<std::size_t>(std::max(c.noise.K, 0))) {
        throw Error(ErrorKind::invalid_value, "[noise].amplitudes has more entries than [noise].K");
    }

    Section fo(root, "forcing");
    fo.real("amp_v", c.forcing.amp_v);
    fo.real("amp_T", c.forcing.amp_T);
    fo.real("amp_S", c.forcing.amp_S);
    fo.finish();

    Section run(root, "run");
    run.real("dt", c.dt);
    run.integer("steps", c.steps);
    if (auto s = run.text("mode")) c.mode = parse_run_mode(*s);
    run.seed("seed", c.seed, true);
    run.integer("substeps", c.substeps);
    run.real("tol", c.tol);
    run.real("init_amp_v", c.init.amp_v);
    run.real("init_amp_T", c.init.amp_T);
    run.real("init_amp_S", c.init.amp_S);
    run.seed("init_seed", c.init.seed, false);
    run.integer("init_modes", c.init.modes);
    run.finish();

    Section out(root, "output");
    out.integer("record_every", c.record_every);
    out.integer("snapshot_every", c.snapshot_every);
    out.real("blowup_ceiling", c.blowup_ceiling);
    out.finish();

    c.validate();
    (void)NoiseModel::from_spec(make_grid(c.grid), c.physics, c.noise);
    return c;
}

} // namespace

RunConfig parse_config_string(std::string_view text, std::string_view source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        const auto& b = e.source().begin;
        std::ostringstream msg;
        msg << source << ':' << b.line << ':' << b.column << ": " << e.description();
        throw Error(ErrorKind::parse_error, msg.str());
    }
    return from_table(root);
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_error, "cannot read config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_string(buf.str(), path.string());
}

std::string config_to_toml(const RunConfig& c) {
    const PhysParams& p = c.physics;
    toml::array amps;
    for (double a : c.noise.amplitudes) amps.push_back(a);
    toml::table root{
        {"grid", toml::table{{"L1", c.grid.L1}, {"L2", c.grid.L2}, {"h", c.grid.h},
                             {"N1", c.grid.N1}, {"N2", c.grid.N2}, {"Nz", c.grid.Nz}}},
        {"physics", toml::table{{"mu_v", p.mu_v}, {"nu_v", p.nu_v}, {"mu_T", p.mu_T}, {"nu_T", p.nu_T},
                                {"mu_S", p.mu_S}, {"nu_S", p.nu_S}, {"f", p.f}, {"g", p.g},
                                {"rho0", p.rho0}, {"beta_T", p.beta_T}, {"beta_S", p.beta_S},
                                {"T_r", p.T_r}, {"S_r", p.S_r}, {"advection", p.advection}}},
        {"noise", toml::table{{"kind", std::string(to_string(c.noise.kind))}, {"K", c.noise.K},
                              {"amplitude", c.noise.amplitude},
                              {"target", std::string(to_string(c.noise.target))}, {"amplitudes", amps}}},
        {"forcing", toml::table{{"amp_v", c.forcing.amp_v}, {"amp_T", c.forcing.amp_T},
                                {"amp_S", c.forcing.amp_S}}},
        {"run", toml::table{{"dt", c.dt}, {"steps", c.steps}, {"mode", std::string(to_string(c.mode))},
                            {"seed", static_cast<std::int64_t>(c.seed)}, {"substeps", c.substeps},
                            {"tol", c.tol}, {"init_amp_v", c.init.amp_v}, {"init_amp_T", c.init.amp_T},
                            {"init_amp_S", c.init.amp_S},
                            {"init_seed", static_cast<std::int64_t>(c.init.seed)},
                            {"init_modes", c.init.modes}}},
        {"output", toml::table{{"record_every", c.record_every}, {"snapshot_every", c.snapshot_every},
                               {"blowup_ceiling", c.blowup_ceiling}}},
    };
    std::ostringstream out;
    out << toml::toml_formatter{root, toml::format_flags::none} << '\n';
    return out.str();
}

} // namespace hsto
