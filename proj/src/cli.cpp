#include "nvscc/cli.hpp"

#include "nvscc/csv.hpp"
#include "nvscc/electrode.hpp"
#include "nvscc/protocol.hpp"
#include "nvscc/sideband.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nvscc::cli {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string>& default_values() {
    static const std::map<std::string, std::string> d = {
        {"sideband.huang_rhys", "3.49"},
        {"sideband.temperatures", "0,300"},
        {"sideband.n_max", "8"},
        {"sideband.step_ev", "0.0005"},
        {"sideband.range_ev", "1.5"},
        {"sideband.zpl_ev", "1.945"},
        {"sideband.zpl_fwhm_thz", "1"},
        {"sideband.one_phonon", ""},
        {"sideband.absorption_reference", ""},
        {"sideband.photoionization", ""},
        {"sideband.green_energy_ev", "2.3"},
        {"rates.radiative", "65.3"},
        {"rates.upper_isc_0", "6.7"},
        {"rates.upper_isc_pm", "53"},
        {"rates.lower_isc_0", "2.38"},
        {"rates.lower_isc_pm", "0.35"},
        {"protocol.kind", "electrode_scc"},
        {"protocol.runs", "1"},
        {"protocol.sigma_pump", ""},
        {"protocol.sigma_ion", ""},
        {"protocol.x_max", "500"},
        {"protocol.i_max", "5000"},
        {"protocol.t_max", "5"},
        {"protocol.share_powers", "true"},
        {"protocol.init_mixing", "0"},
        {"protocol.starts", "16"},
        {"protocol.samples", "512"},
        {"protocol.sweep_points", "21"},
        {"sigma_sweep.sigmas", "0,0.05,0.1,0.15,0.2,0.26,0.3,0.4,0.5"},
        {"sigma_sweep.runs", "1,3"},
        {"electrode.radius_nm", "100"},
        {"electrode.nv_depth_nm", "10"},
        {"electrode.dielectric", "5.7"},
        {"electrode.insulator_nm", "0"},
        {"electrode.m_longitudinal", "1.56"},
        {"electrode.m_transverse", "0.28"},
        {"electrode.v_min", "-2"},
        {"electrode.v_max", "2"},
        {"electrode.v_step", "0.25"},
        {"electrode.r_max_nm", "200"},
        {"electrode.z_max_nm", "40"},
        {"electrode.n_radial", "60"},
        {"electrode.n_axial", "120"},
    };
    return d;
}

const std::map<std::string, std::string>& aliases() {
    static const std::map<std::string, std::string> a = {
        {"temperature", "sideband.temperatures"},
        {"runs", "protocol.runs"},
        {"protocol", "protocol.kind"},
        {"sigma", "protocol.sigma_pump"},
    };
    return a;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string canonical_key(std::string k) {
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

struct DatasetError : ConfigError {
    using ConfigError::ConfigError;
};

}  // namespace

RunConfig::RunConfig() : values_(default_values()) {}

std::string RunConfig::resolve(const std::string& raw) const {
    const std::string key = canonical_key(raw);
    if (values_.count(key)) return key;
    if (const auto it = aliases().find(key); it != aliases().end()) return it->second;
    std::string found;
    for (const auto& [k, v] : values_) {
        const auto dot = k.find('.');
        if (k.substr(dot + 1) == key) {
            if (!found.empty()) throw ConfigError("ambiguous setting '" + raw + "' (use section.key)");
            found = k;
        }
    }
    if (found.empty()) throw ConfigError("unknown setting '" + raw + "'");
    return found;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const std::string k = canonical_key(key);
    if (k == "out") {
        out_dir = value;
        return;
    }
    if (k == "seed") {
        try {
            std::size_t pos = 0;
            if (value.empty() || !std::isdigit(static_cast<unsigned char>(value.front()))) throw std::invalid_argument("sign");
            seed = std::stoull(value, &pos);
            if (pos != value.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError("seed must be a non-negative integer, got '" + value + "'");
        }
        return;
    }
    values_[resolve(k)] = trim(value);
}

void RunConfig::load_file(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw ConfigError("cannot read config file " + path.string());
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_file(path.string());
    } catch (const CLI::Error& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section open/close markers
        std::string value;
        for (const auto& part : item.inputs) value += (value.empty() ? "" : ",") + part;
        set(item.fullname(), value);
    }
}

std::string RunConfig::text(const std::string& key) const { return values_.at(resolve(key)); }

double RunConfig::number(const std::string& key) const {
    const std::string v = text(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument("bad");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("setting '" + key + "' must be a number, got '" + v + "'");
    }
}

int RunConfig::integer(const std::string& key) const {
    const double d = number(key);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("setting '" + key + "' must be an integer");
    return static_cast<int>(d);
}

bool RunConfig::boolean(const std::string& key) const {
    std::string v = text(key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("setting '" + key + "' must be true or false");
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size() || !std::isfinite(out.back())) throw std::invalid_argument("bad");
        } catch (const std::exception&) {
            throw ConfigError("setting '" + key + "' must be a comma-separated list of numbers");
        }
    }
    if (out.empty()) throw ConfigError("setting '" + key + "' is empty");
    return out;
}

namespace {

const std::vector<std::pair<std::string, std::string>>& subcommands() {
    static const std::vector<std::pair<std::string, std::string>> subs = {
        {"sideband", "Huang-Rhys absorption sideband at one or more temperatures"},
        {"contrast", "optimize spin-readout contrast for one protocol"},
        {"sigma-sweep", "optimized contrast as a function of sigma"},
        {"electrode", "NV and conduction-band shifts versus electrode potential"},
        {"reproduce-all", "run every analysis and write summary.csv"},
    };
    return subs;
}

std::string settings_help(const std::string& subcommand) {
    static const std::map<std::string, std::vector<std::string>> sections = {
        {"sideband", {"sideband"}},
        {"contrast", {"protocol", "rates"}},
        {"sigma-sweep", {"sigma_sweep", "protocol", "rates"}},
        {"electrode", {"electrode"}},
        {"reproduce-all", {"sideband", "protocol", "rates", "sigma_sweep", "electrode"}},
    };
    std::ostringstream os;
    os << "Settings (override with --key value or key=value; defaults shown):\n";
    for (const auto& section : sections.at(subcommand)) {
        for (const auto& [key, value] : default_values()) {
            if (key.rfind(section + ".", 0) != 0) continue;
            os << "  " << key << " = " << (value.empty() ? "(unset)" : value) << '\n';
        }
    }
    return os.str();
}

struct CommandLine {
    CLI::App app{"Spin-to-charge readout modelling for NV centres", "nvscc"};
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 1;

    CommandLine() {
        app.require_subcommand(1);
        app.set_help_flag("-h,--help", "show this help");
        for (const auto& [name, desc] : subcommands()) {
            CLI::App* sub = app.add_subcommand(name, desc);
            sub->allow_extras();
            sub->footer(settings_help(name));
            sub->add_option("--config", config_path, "INI file with [section] key = value settings");
            sub->add_option("--out", out_dir, "output directory");
            sub->add_option("--seed", seed, "optimizer seed")->check(CLI::NonNegativeNumber);
        }
        app.footer(
            "Any setting can be overridden as --key value, --key=value or key=value, using section.key\n"
            "or a bare key when unambiguous (e.g. --temperature 0,300, --n-max 4, --runs 3, sigma_pump=0.1).");
    }
};

}  // namespace

std::string usage() { return CommandLine().app.help(); }

namespace {

bool is_subcommand(const std::string& name) {
    const auto& subs = subcommands();
    return std::any_of(subs.begin(), subs.end(), [&](const auto& s) { return s.first == name; });
}

std::string help_for(const std::vector<std::string>& args) {
    if (!args.empty() && is_subcommand(args[0])) {
        CommandLine cl;
        return cl.app.get_subcommand(args[0])->help();
    }
    return usage();
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
    if (args.empty()) throw ConfigError("missing subcommand\n" + usage());
    if (!is_subcommand(args[0])) throw ConfigError("unknown subcommand '" + args[0] + "'\n" + usage());
    CommandLine cl;
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        cl.app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    const CLI::App* sub = cl.app.get_subcommands().front();

    RunConfig cfg;
    cfg.subcommand = sub->get_name();
    if (!cl.config_path.empty()) cfg.load_file(cl.config_path);
    if (!cl.out_dir.empty()) cfg.out_dir = cl.out_dir;
    if (sub->count("--seed")) cfg.seed = cl.seed;

    const std::vector<std::string> extras = sub->remaining();
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& a = extras[i];
        std::string key;
        std::string value;
        if (a.rfind("--", 0) == 0) {
            key = a.substr(2);
            if (const auto eq = key.find('='); eq != std::string::npos) {
                value = key.substr(eq + 1);
                key = key.substr(0, eq);
            } else {
                if (i + 1 >= extras.size() || extras[i + 1].rfind("--", 0) == 0) {
                    throw ConfigError("option --" + key + " needs a value");
                }
                value = extras[++i];
            }
        } else if (const auto eq = a.find('='); eq != std::string::npos) {
            key = a.substr(0, eq);
            value = a.substr(eq + 1);
        } else {
            throw ConfigError("unexpected argument '" + a + "'");
        }
        cfg.set(key, value);
    }
    return cfg;
}

namespace {

// ---------------------------------------------------------------- helpers

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("output directory " + dir.string() + " is not writable");
}

std::string temperature_tag(double t) { return io::format_number(t) + "K"; }

// Explicit path from the config, else NVSCC_DATA_DIR/<file> when present.
std::string dataset_path(const RunConfig& cfg, const std::string& key, const std::string& file) {
    const std::string explicit_path = cfg.text(key);
    if (!explicit_path.empty()) {
        if (!fs::exists(explicit_path)) throw DatasetError("dataset not found: " + explicit_path);
        return explicit_path;
    }
    if (const char* dir = std::getenv("NVSCC_DATA_DIR"); dir && *dir) {
        const fs::path p = fs::path(dir) / file;
        if (fs::exists(p)) return p.string();
    }
    return {};
}

NvRatesd rates_from(const RunConfig& cfg) {
    NvRatesd r;
    r.radiative = cfg.number("rates.radiative");
    r.upper_isc_0 = cfg.number("rates.upper_isc_0");
    r.upper_isc_pm = cfg.number("rates.upper_isc_pm");
    r.lower_isc_0 = cfg.number("rates.lower_isc_0");
    r.lower_isc_pm = cfg.number("rates.lower_isc_pm");
    validate(r);
    return r;
}

ProtocolSpec protocol_from(const RunConfig& cfg, ProtocolKind kind, int runs) {
    if (runs < 1) throw ConfigError("runs must be at least 1");
    ProtocolSpec s;
    switch (kind) {
        case ProtocolKind::jaskula: s = ProtocolSpec::jaskula(); break;
        case ProtocolKind::electrode_scc:
        case ProtocolKind::repeated_scc:
            s = runs == 1 ? ProtocolSpec::electrode_scc() : ProtocolSpec::repeated_scc(runs);
            break;
    }
    if (!cfg.text("protocol.sigma_pump").empty()) s.sigma_pump = cfg.number("protocol.sigma_pump");
    if (!cfg.text("protocol.sigma_ion").empty()) s.sigma_ion = cfg.number("protocol.sigma_ion");
    s.excitation.hi = cfg.number("protocol.x_max");
    s.ionization.hi = cfg.number("protocol.i_max");
    s.duration.hi = cfg.number("protocol.t_max");
    s.share_powers = cfg.boolean("protocol.share_powers");
    s.init_mixing = cfg.number("protocol.init_mixing");
    s.rates = rates_from(cfg);
    try {
        validate(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

ProtocolSpec protocol_from(const RunConfig& cfg) {
    ProtocolKind kind;
    try {
        kind = protocol_kind_from_string(cfg.text("protocol.kind"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return protocol_from(cfg, kind, kind == ProtocolKind::jaskula ? 1 : cfg.integer("protocol.runs"));
}

OptimizeOptions optimizer_from(const RunConfig& cfg) {
    OptimizeOptions o;
    o.seed = cfg.seed;
    o.starts = cfg.integer("protocol.starts");
    o.seed_samples = cfg.integer("protocol.samples");
    if (o.starts < 1 || o.seed_samples < 0) throw ConfigError("optimizer starts must be >= 1 and samples >= 0");
    return o;
}

std::string column_name(const std::string& param, const std::string& unit) {
    std::string n = param;
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    return n + "_" + (unit == "us" ? "us" : "mhz");
}

io::Table curve_table(const ProtocolSpec& spec, const std::string& first_column, const std::vector<CurvePoint>& curve) {
    io::Table t;
    t.header = {first_column, "contrast"};
    const auto names = parameter_names(spec);
    const auto units = parameter_units(spec);
    for (std::size_t i = 0; i < names.size(); ++i) t.header.push_back(column_name(names[i], units[i]));
    for (const auto& p : curve) {
        std::vector<double> row = {p.param_value, p.result.best_contrast};
        for (Eigen::Index i = 0; i < p.result.x.size(); ++i) row.push_back(p.result.x(i));
        t.add_row(row);
    }
    return t;
}

std::vector<double> sweep_grid(double lo, double hi, int points, double must_include) {
    std::vector<double> g;
    for (int k = 0; k < points; ++k) g.push_back(lo + (hi - lo) * k / std::max(1, points - 1));
    g.push_back(must_include);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

io::Series series_of(const std::string& label, const std::vector<CurvePoint>& curve) {
    io::Series s{label, {}, {}};
    for (const auto& p : curve) {
        s.x.push_back(p.param_value);
        s.y.push_back(p.result.best_contrast);
    }
    return s;
}

void print_result(std::ostream& out, const OptimizationResult& r) {
    out << "contrast=" << io::format_number(r.best_contrast) << '\n';
    for (const auto& p : r.best_params) out << "  " << p.name << "=" << io::format_number(p.value) << " " << p.unit << '\n';
}

void write_optimum(const fs::path& path, const OptimizationResult& r) {
    io::Table t;
    t.header = {"quantity", "unit", "value"};
    t.add_row({"contrast", "fraction", io::format_number(r.best_contrast)});
    for (const auto& p : r.best_params) t.add_row({p.name, p.unit, io::format_number(p.value)});
    t.add_row({"evaluations", "count", std::to_string(r.evaluations)});
    io::write_table(path, t);
}

// ---------------------------------------------------------------- sideband

struct SidebandOutputs {
    std::map<double, SpectralMoments> moments;  // by temperature, ZPL omitted
    std::vector<std::pair<std::string, double>> ratios;
};

SidebandOutputs run_sideband(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    ensure_dir(dir);
    const double step = cfg.number("sideband.step_ev");
    const double range = cfg.number("sideband.range_ev");
    if (!(step > 0.0) || !(range > step)) throw ConfigError("sideband grid needs step > 0 and range > step");

    Spectrum f;
    nlohmann::json source;
    if (const std::string p = dataset_path(cfg, "sideband.one_phonon", "one_phonon.csv"); !p.empty()) {
        f = normalized(io::read_spectrum_csv(p, step));
        if (f.start < -1e-12) throw DatasetError("one-phonon dataset " + p + " has negative energies");
        f = resampled(f, 0.0, step, static_cast<Eigen::Index>(std::floor(f.last_energy() / step + 1e-9)) + 1);
        f = normalized(f);
        source = p;
    } else {
        f = synthetic_one_phonon(step);
        source = "synthetic";
    }
    io::write_spectrum_csv(dir / "one_phonon.csv", f, nlohmann::json{{"source", source}});

    HuangRhysParams hr;
    hr.huang_rhys = cfg.number("sideband.huang_rhys");
    hr.n_max = cfg.integer("sideband.n_max");
    const double zpl_energy = cfg.number("sideband.zpl_ev");
    const auto count = static_cast<Eigen::Index>(std::llround(2.0 * range / step)) + 1;

    double scale = 1.0;
    const std::string ref_path = dataset_path(cfg, "sideband.absorption_reference", "absorption_0K.csv");
    const std::string photo_path = dataset_path(cfg, "sideband.photoionization", "photoionization.csv");

    SidebandOutputs result;
    std::vector<io::Series> plot;
    bool have_scale = false;
    for (double t : cfg.numbers("sideband.temperatures")) {
        hr.temperature = t;
        try {
            validate(hr);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        const Spectrum detuned = sideband(f, hr);
        Spectrum absolute = shifted(resampled(detuned, -range, step, count), zpl_energy);
        if (!ref_path.empty() && !have_scale) {
            // Scale to the reference 0 K absorption over their common range.
            HuangRhysParams cold = hr;
            cold.temperature = 0.0;
            const Spectrum cold_abs = shifted(resampled(sideband(f, cold), -range, step, count), zpl_energy);
            const Spectrum ref = io::read_spectrum_csv(ref_path);
            const double denom = integrate(resampled(cold_abs, ref.start, ref.step, ref.size()));
            if (!(denom > 0.0)) throw DatasetError("absorption reference " + ref_path + " does not overlap the sideband");
            scale = integrate(ref) / denom;
            have_scale = true;
        }
        absolute.values *= scale;
        const double s_t = effective_huang_rhys(f, hr);
        const nlohmann::json meta = {{"huang_rhys_0K", hr.huang_rhys}, {"huang_rhys_T", s_t}, {"temperature_k", t},
                                     {"n_max", hr.n_max}, {"zpl_ev", zpl_energy}, {"scale", scale}, {"zpl_included", false}};
        io::write_spectrum_csv(dir / ("sideband_" + temperature_tag(t) + ".csv"), absolute, meta);
        result.moments[t] = moments(absolute);

        ZplParams zpl;
        zpl.center = zpl_energy;
        zpl.fwhm = thz_to_ev(cfg.number("sideband.zpl_fwhm_thz"));
        zpl.weight = std::exp(-s_t) * scale;
        const Spectrum with_zpl = add_zpl(absolute, zpl);
        nlohmann::json zmeta = meta;
        zmeta["zpl_included"] = true;
        zmeta["zpl_fwhm_ev"] = zpl.fwhm;
        zmeta["zpl_weight"] = zpl.weight;
        io::write_spectrum_csv(dir / ("sideband_" + temperature_tag(t) + "_zpl.csv"), with_zpl, zmeta);

        io::Series s{temperature_tag(t), {}, {}};
        for (Eigen::Index i = 0; i < absolute.size(); ++i) {
            if (absolute.energy(i) < zpl_energy - 0.2 || absolute.energy(i) > zpl_energy + 1.3) continue;
            s.x.push_back(absolute.energy(i));
            s.y.push_back(absolute.values(i));
        }
        plot.push_back(std::move(s));

        out << "sideband T=" << io::format_number(t) << " K: S(T)=" << io::format_number(s_t)
            << " variance_ev2=" << io::format_number(result.moments[t].variance) << '\n';

        if (!photo_path.empty() && t == 300.0) {
            const Spectrum photo = io::read_spectrum_csv(photo_path);
            const double green = cfg.number("sideband.green_energy_ev");
            result.ratios.emplace_back("sigma_green", cross_section_ratio(absolute, photo, green));
            result.ratios.emplace_back("sigma_zpl", cross_section_ratio(with_zpl, photo, zpl_energy));
        }
    }
    io::write_svg_plot(dir / "sideband.svg", "Huang-Rhys absorption sideband (ZPL omitted)", "photon energy (eV)",
                       "absorption (per eV)", plot);
    if (!result.ratios.empty()) {
        io::Table t;
        t.header = {"ratio", "energy_ev", "sigma"};
        t.add_row({"sigma_green", io::format_number(cfg.number("sideband.green_energy_ev")),
                   io::format_number(result.ratios[0].second)});
        t.add_row({"sigma_zpl", io::format_number(zpl_energy), io::format_number(result.ratios[1].second)});
        io::write_table(dir / "sigma_ratios.csv", t);
        for (const auto& [name, v] : result.ratios) out << name << "=" << io::format_number(v) << '\n';
    } else {
        out << "cross-section ratios skipped: no photoionization dataset (set NVSCC_DATA_DIR or sideband.photoionization)\n";
    }
    return result;
}

// ---------------------------------------------------------------- contrast

OptimizationResult run_contrast(const RunConfig& cfg, const ProtocolSpec& spec, const fs::path& dir, std::ostream& out,
                                bool with_curves) {
    ensure_dir(dir);
    const OptimizeOptions opts = optimizer_from(cfg);
    const OptimizationResult best = optimize_contrast(spec, opts);
    print_result(out, best);
    write_optimum(dir / "contrast_optimum.csv", best);
    if (!with_curves) return best;

    const int points = cfg.integer("protocol.sweep_points");
    if (points < 2) throw ConfigError("sweep_points must be at least 2");
    const auto names = parameter_names(spec);
    const std::string power = names[0];
    const std::string pump_time = names[spec.kind == ProtocolKind::jaskula ? 1 : 2];
    const optim::Box box = parameter_box(spec);
    const double x_star = best.x(0);
    const int t_idx = parameter_index(spec, pump_time);
    const double t_star = best.x(t_idx);

    const auto x_grid = sweep_grid(0.0, std::min(box.hi(0), std::max(100.0, 4.0 * x_star)), points, x_star);
    const auto t_grid = sweep_grid(0.0, std::min(box.hi(t_idx), std::max(0.5, 4.0 * t_star)), points, t_star);
    const auto cx = contrast_vs_param(spec, power, x_grid, opts);
    const auto ct = contrast_vs_param(spec, pump_time, t_grid, opts);
    io::write_table(dir / "contrast_vs_excitation.csv", curve_table(spec, "param_value", cx));
    io::write_table(dir / "contrast_vs_pump_duration.csv", curve_table(spec, "param_value", ct));
    io::write_svg_plot(dir / "contrast_vs_excitation.svg", "Contrast vs pump excitation rate", power + " (MHz)",
                       "optimized contrast", {series_of(to_string(spec.kind), cx)});
    io::write_svg_plot(dir / "contrast_vs_pump_duration.svg", "Contrast vs pump duration", pump_time + " (us)",
                       "optimized contrast", {series_of(to_string(spec.kind), ct)});
    return best;
}

// ---------------------------------------------------------------- sigma sweep

std::map<int, std::vector<CurvePoint>> run_sigma_sweep(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    ensure_dir(dir);
    const auto sigmas = cfg.numbers("sigma_sweep.sigmas");
    for (double s : sigmas) {
        if (s < 0.0) throw ConfigError("sigma values must be >= 0");
    }
    const OptimizeOptions opts = optimizer_from(cfg);
    std::map<int, std::vector<CurvePoint>> curves;
    std::vector<io::Series> plot;
    for (double rd : cfg.numbers("sigma_sweep.runs")) {
        const int runs = static_cast<int>(rd);
        if (rd != runs || runs < 1) throw ConfigError("sigma_sweep.runs must list positive integers");
        const ProtocolSpec spec = protocol_from(cfg, ProtocolKind::electrode_scc, runs);
        const auto curve = sigma_sweep(spec, sigmas, opts);
        io::write_table(dir / ("sigma_sweep_runs" + std::to_string(runs) + ".csv"), curve_table(spec, "param_value", curve));
        for (const auto& p : curve) {
            out << "runs=" << runs << " sigma=" << io::format_number(p.param_value)
                << " contrast=" << io::format_number(p.result.best_contrast) << '\n';
        }
        plot.push_back(series_of(std::to_string(runs) + " run(s)", curve));
        curves[runs] = curve;
    }
    io::write_svg_plot(dir / "sigma_sweep.svg", "Optimized contrast vs sigma", "sigma", "optimized contrast", plot);
    return curves;
}

// ---------------------------------------------------------------- electrode

std::vector<GapShiftPoint> run_electrode(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    ensure_dir(dir);
    ElectrodeConfig ec;
    ec.electrode_radius = cfg.number("electrode.radius_nm");
    ec.nv_depth = cfg.number("electrode.nv_depth_nm");
    ec.dielectric_constant = cfg.number("electrode.dielectric");
    ec.insulator_thickness = cfg.number("electrode.insulator_nm");
    EffectiveMass mass{cfg.number("electrode.m_longitudinal"), cfg.number("electrode.m_transverse")};
    GridSpec grid;
    grid.r_max = cfg.number("electrode.r_max_nm");
    grid.z_max = cfg.number("electrode.z_max_nm");
    grid.n_radial = cfg.integer("electrode.n_radial");
    grid.n_axial = cfg.integer("electrode.n_axial");
    grid.n_levels = 1;
    try {
        validate(ec);
        validate(mass);
        validate(grid);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const double vmin = cfg.number("electrode.v_min");
    const double vmax = cfg.number("electrode.v_max");
    const double vstep = cfg.number("electrode.v_step");
    if (!(vstep > 0.0) || vmin > 0.0 || vmax < 0.0) throw ConfigError("electrode sweep must satisfy v_min <= 0 <= v_max, v_step > 0");
    std::vector<double> vs;
    for (long k = static_cast<long>(std::ceil(vmin / vstep - 1e-9)); k * vstep <= vmax + 1e-9; ++k) vs.push_back(k * vstep);

    const auto curve = gap_shift(ec, mass, vs, grid);
    io::Table t;
    t.header = {"potential_v", "nv_shift_ev", "cbm_shift_ev", "gap_shift_ev"};
    io::Series nv{"NV shift", {}, {}}, cbm{"CBM shift", {}, {}}, gap{"gap shift", {}, {}};
    for (const auto& p : curve) {
        t.add_row({p.potential, p.nv_shift, p.cbm_shift, p.gap_shift});
        nv.x.push_back(p.potential), nv.y.push_back(p.nv_shift);
        cbm.x.push_back(p.potential), cbm.y.push_back(p.cbm_shift);
        gap.x.push_back(p.potential), gap.y.push_back(p.gap_shift);
    }
    io::write_table(dir / "electrode_gap_shift.csv", t);
    io::write_svg_plot(dir / "electrode_gap_shift.svg", "Electrode-induced level shifts", "electrode potential (V)",
                       "shift (eV)", {nv, cbm, gap});
    out << "electrode: " << curve.size() << " potentials written to " << (dir / "electrode_gap_shift.csv").string() << '\n';
    return curve;
}

// ---------------------------------------------------------------- summary

struct Claim {
    std::string name;
    std::string target;
    double computed = 0.0;
    std::string tolerance;
    bool pass = false;
};

Claim within(const std::string& name, double target, double computed, double tol) {
    return {name, io::format_number(target), computed, io::format_number(tol), std::abs(computed - target) <= tol};
}

}  // namespace

int cmd_sideband(const RunConfig& cfg, std::ostream& out) {
    run_sideband(cfg, cfg.out_dir, out);
    return kExitOk;
}

int cmd_contrast(const RunConfig& cfg, std::ostream& out) {
    run_contrast(cfg, protocol_from(cfg), cfg.out_dir, out, true);
    return kExitOk;
}

int cmd_sigma_sweep(const RunConfig& cfg, std::ostream& out) {
    run_sigma_sweep(cfg, cfg.out_dir, out);
    return kExitOk;
}

int cmd_electrode(const RunConfig& cfg, std::ostream& out) {
    run_electrode(cfg, cfg.out_dir, out);
    return kExitOk;
}

int cmd_reproduce_all(const RunConfig& cfg, std::ostream& out) {
    const fs::path root = cfg.out_dir;
    ensure_dir(root);
    std::vector<Claim> claims;

    const auto sb = run_sideband(cfg, root / "sideband", out);
    if (sb.moments.count(0.0) && sb.moments.count(300.0)) {
        const double ratio = sb.moments.at(300.0).variance / sb.moments.at(0.0).variance;
        claims.push_back({"sideband_300K_broader_than_0K", ">1", ratio, "0", ratio > 1.0});
    }
    for (const auto& [name, v] : sb.ratios) {
        const double target = name == "sigma_green" ? 0.26 : 0.1;
        claims.push_back({name, io::format_number(target), v, "15%", std::abs(v - target) <= 0.15 * target});
    }

    const auto single = run_contrast(cfg, protocol_from(cfg, ProtocolKind::electrode_scc, 1), root / "contrast_single", out, true);
    claims.push_back(within("single_run_contrast", 0.33, single.best_contrast, 0.03));
    const auto three = run_contrast(cfg, protocol_from(cfg, ProtocolKind::repeated_scc, 3), root / "contrast_runs3", out, false);
    claims.push_back(within("three_run_contrast", 0.42, three.best_contrast, 0.03));
    const auto four = run_contrast(cfg, protocol_from(cfg, ProtocolKind::repeated_scc, 4), root / "contrast_runs4", out, false);
    const double gain = four.best_contrast - three.best_contrast;
    claims.push_back({"four_run_gain_over_three_run", "<0.01", gain, "0.01", gain < 0.01});
    const auto jas = run_contrast(cfg, protocol_from(cfg, ProtocolKind::jaskula, 1), root / "contrast_jaskula", out, false);
    claims.push_back(within("jaskula_contrast", 0.37, jas.best_contrast, 0.03));

    RunConfig sweep_cfg = cfg;
    sweep_cfg.set("sigma_sweep.runs", "1,3");
    const auto sweeps = run_sigma_sweep(sweep_cfg, root / "sigma_sweep", out);
    const auto at_zero = [](const std::vector<CurvePoint>& c) {
        for (const auto& p : c)
            if (p.param_value == 0.0) return p.result.best_contrast;
        throw ConfigError("sigma sweep must include sigma = 0");
    };
    claims.push_back(within("sigma0_single_run_contrast", 0.58, at_zero(sweeps.at(1)), 0.03));
    claims.push_back(within("sigma0_three_run_contrast", 0.61, at_zero(sweeps.at(3)), 0.03));
    double worst_rise = -1.0;
    for (const auto& [runs, curve] : sweeps) {
        std::vector<CurvePoint> sorted = curve;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.param_value < b.param_value; });
        for (std::size_t i = 1; i < sorted.size(); ++i) {
            worst_rise = std::max(worst_rise, sorted[i].result.best_contrast - sorted[i - 1].result.best_contrast);
        }
    }
    claims.push_back({"sigma_envelope_max_rise", "<=0", worst_rise, "0.001", worst_rise <= 1e-3});

    claims.push_back(within("sensitivity_gain_three_run", 1.62, sensitivity_improvement(0.25, 0.42), 0.005));
    claims.push_back(within("sensitivity_gain_sigma0_three_run", 2.36, sensitivity_improvement(0.25, 0.61), 0.005));

    const auto el = run_electrode(cfg, root / "electrode", out);
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& p : el)
        if (p.potential > 0.0) min_margin = std::min(min_margin, p.nv_shift - p.cbm_shift);
    claims.push_back({"nv_shift_exceeds_cbm_shift", ">0", min_margin, "0", min_margin > 0.0});

    io::Table t;
    t.header = {"claim", "paper_value", "computed_value", "tolerance", "pass"};
    bool all = true;
    for (const auto& c : claims) {
        t.add_row({c.name, c.target, io::format_number(c.computed), c.tolerance, c.pass ? "true" : "false"});
        all = all && c.pass;
    }
    io::write_table(root / "summary.csv", t);
    out << "summary written to " << (root / "summary.csv").string() << '\n';
    if (!all) {
        out << "FAILED claims:\n";
        for (const auto& c : claims) {
            if (!c.pass) {
                out << "  " << c.name << " target=" << c.target << " computed=" << io::format_number(c.computed)
                    << " tolerance=" << c.tolerance << '\n';
            }
        }
        return kExitClaimFailed;
    }
    return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (std::any_of(args.begin(), args.end(), [](const std::string& a) { return a == "--help" || a == "-h"; }) ||
        (!args.empty() && args[0] == "help")) {
        out << help_for(args);
        return kExitOk;
    }
    try {
        const RunConfig cfg = parse_args(args);
        if (cfg.subcommand == "sideband") return cmd_sideband(cfg, out);
        if (cfg.subcommand == "contrast") return cmd_contrast(cfg, out);
        if (cfg.subcommand == "sigma-sweep") return cmd_sigma_sweep(cfg, out);
        if (cfg.subcommand == "electrode") return cmd_electrode(cfg, out);
        return cmd_reproduce_all(cfg, out);
    } catch (const ConfigError& e) {
        err << "nvscc: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        err << "nvscc: invalid input: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::exception& e) {
        err << "nvscc: " << e.what() << '\n';
        return kExitClaimFailed;
    }
}

}  // namespace nvscc::cli
