#include "glassfrac/io.hpp"

#include "glassfrac/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace glassfrac {

std::string_view version() { return "1.0.0"; }

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_number(const std::string& text, double& out)
{
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* end = t.data() + t.size();
    const auto r = std::from_chars(t.data(), end, out);
    return r.ec == std::errc() && r.ptr == end && std::isfinite(out);
}

bool parse_integer(const std::string& text, int& out)
{
    const std::string t = trim(text);
    const char* end = t.data() + t.size();
    const auto r = std::from_chars(t.data(), end, out);
    return !t.empty() && r.ec == std::errc() && r.ptr == end;
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

using Setter = std::function<void(const std::string& value, std::vector<std::string>& bad, const std::string& key)>;

Setter real(double& target)
{
    return [&target](const std::string& v, std::vector<std::string>& bad, const std::string& key) {
        if (!parse_number(v, target)) bad.push_back(key + ": '" + v + "' is not a number");
    };
}

Setter optional_real(std::optional<double>& target)
{
    return [&target](const std::string& v, std::vector<std::string>& bad, const std::string& key) {
        double x = 0.0;
        if (!parse_number(v, x)) bad.push_back(key + ": '" + v + "' is not a number");
        else target = x;
    };
}

Setter integer(int& target)
{
    return [&target](const std::string& v, std::vector<std::string>& bad, const std::string& key) {
        if (!parse_integer(v, target)) bad.push_back(key + ": '" + v + "' is not an integer");
    };
}

template <class E>
Setter choice(E& target, std::vector<std::pair<std::string, E>> options)
{
    return [&target, options](const std::string& v, std::vector<std::string>& bad, const std::string& key) {
        const std::string want = lower(trim(v));
        std::string names;
        for (const auto& [name, value] : options) {
            if (name == want) {
                target = value;
                return;
            }
            names += (names.empty() ? "" : ", ") + name;
        }
        bad.push_back(key + ": '" + v + "' is not one of " + names);
    };
}

Setter real_list(std::vector<double>& target)
{
    return [&target](const std::string& v, std::vector<std::string>& bad, const std::string& key) {
        target.clear();
        if (trim(v).empty()) return;
        for (const auto& item : split(v, ',')) {
            double x = 0.0;
            if (!parse_number(item, x)) bad.push_back(key + ": '" + item + "' is not a number");
            else target.push_back(x);
        }
    };
}

}  // namespace

RunConfig parse_run_config(const std::string& text)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config is not valid INI: ") + e.message() + " (line " +
                              std::to_string(e.line()) + ")",
                          {e.message()});
    }

    RunConfig cfg;
    auto& sc = cfg.scenario;
    auto& so = cfg.solver;
    std::vector<std::string> bad;
    std::string interlayer = "eva";
    std::string schedule_text, patch_text;
    bool have_schedule = false;

    const std::map<std::string, std::map<std::string, Setter>> table{
        {"scenario",
         {
             {"model", choice(sc.model, {{"plane-stress", ModelKind::PlaneStress}, {"beam", ModelKind::Beam}})},
             {"layup", choice(sc.layup, {{"monolith", Layup::Monolith}, {"laminate", Layup::Laminate}})},
             {"length", real(sc.length)},
             {"width", real(sc.width)},
             {"monolith_thickness", real(sc.monolith_thickness)},
             {"bottom_thickness", real(sc.bottom_thickness)},
             {"interlayer_thickness", real(sc.interlayer_thickness)},
             {"top_thickness", real(sc.top_thickness)},
             {"interlayer", [&](const std::string& v, std::vector<std::string>&, const std::string&) { interlayer = trim(v); }},
             {"interlayer_poisson_ratio", real(sc.interlayer_poisson_ratio)},
             {"support_x", real(sc.support_x)},
             {"load_x", real(sc.load_x)},
             {"loading_rate", real(sc.loading_rate)},
             {"temperature", real(sc.temperature)},
             {"symmetry", choice(sc.symmetry, {{"half", Symmetry::Half}, {"full", Symmetry::Full}})},
             {"element_size", real(sc.element_size)},
             {"band_size", real(sc.band_size)},
             {"transition_width", real(sc.transition_width)},
             {"min_glass_elements", integer(sc.min_glass_elements)},
             {"min_interlayer_elements", integer(sc.min_interlayer_elements)},
             {"beam_driver", choice(sc.driver, {{"integrated", BeamDriver::Integrated}, {"surface", BeamDriver::Surface}})},
         }},
        {"formulation",
         {
             {"kind", choice(sc.formulation.kind,
                             {{"pf-b", PhaseFieldKind::PfB}, {"pf-m", PhaseFieldKind::PfM}, {"pf-p", PhaseFieldKind::PfP}})},
             {"split", choice(sc.formulation.split, {{"volumetric-deviatoric", EnergySplit::VolumetricDeviatoric},
                                                     {"spectral", EnergySplit::Spectral}})},
             {"scheme", choice(sc.formulation.scheme,
                               {{"anisotropic", StaggeredScheme::Anisotropic}, {"hybrid", StaggeredScheme::Hybrid}})},
             {"length_scale", optional_real(sc.length_scale)},
             {"fracture_energy", optional_real(sc.fracture_energy)},
             {"tensile_strength", real(sc.tensile_strength)},
             {"young_modulus", real(sc.young_modulus)},
             {"poisson_ratio", real(sc.poisson_ratio)},
             {"residual_stiffness", real(sc.formulation.residual_stiffness)},
             {"calibration_reduction",
              [&](const std::string& v, std::vector<std::string>& b, const std::string& key) {
                  Reduction r = Reduction::PlaneStress;
                  choice(r, {{"plane-stress", Reduction::PlaneStress}, {"beam", Reduction::Beam}})(v, b, key);
                  sc.calibration_reduction = r;
              }},
         }},
        {"strength",
         {
             {"patches", [&](const std::string& v, std::vector<std::string>&, const std::string&) { patch_text = v; }},
         }},
        {"solver",
         {
             {"energy_tolerance", real(so.energy_tolerance)},
             {"newton_tolerance", real(so.newton_tolerance)},
             {"max_staggered_iterations", integer(so.max_staggered_iterations)},
             {"max_newton_iterations", integer(so.max_newton_iterations)},
             {"localization_drop", real(so.localization_drop)},
             {"max_cutbacks", integer(so.max_cutbacks)},
             {"schedule",
              [&](const std::string& v, std::vector<std::string>&, const std::string&) {
                  schedule_text = v;
                  have_schedule = true;
              }},
         }},
        {"output",
         {
             {"directory",
              [&](const std::string& v, std::vector<std::string>& b, const std::string& key) {
                  if (trim(v).empty()) b.push_back(key + ": empty path");
                  cfg.output.directory = trim(v);
              }},
             {"snapshot_every", integer(cfg.output.snapshot_every)},
             {"quarter_probe_x", real(sc.quarter_probe_x)},
         }},
        {"initial_cracks",
         {
             {"layer", choice(sc.cracks.layer, {{"bottom", GlassLayer::Bottom}, {"top", GlassLayer::Top}})},
             {"positions", real_list(sc.cracks.positions)},
             {"count", integer(cfg.crack_count)},
             {"width", optional_real(sc.cracks.width)},
         }},
    };

    for (const auto& [section, body] : tree) {
        const auto s = table.find(section);
        if (!body.data().empty()) {
            bad.push_back("'" + section + "' must be a [section]");
            continue;
        }
        if (s == table.end()) {
            bad.push_back("unknown section [" + section + "]");
            continue;
        }
        for (const auto& [key, node] : body) {
            const std::string value = node.data();
            cfg.echo[section][key] = value;
            const auto k = s->second.find(key);
            if (k == s->second.end()) {
                bad.push_back("unknown key " + section + "." + key);
                continue;
            }
            k->second(value, bad, section + "." + key);
        }
    }

    const std::string il = lower(interlayer);
    if (il == "eva") {
        sc.interlayer = InterlayerKind::Eva;
    } else if (il == "pvb") {
        sc.interlayer = InterlayerKind::Pvb;
    } else {
        try {
            sc.interlayer_prony = read_prony_csv(interlayer);
        } catch (const std::exception& e) {
            bad.push_back("scenario.interlayer: '" + interlayer + "' is neither eva, pvb nor a readable Prony CSV (" +
                          e.what() + ")");
        }
    }

    if (!have_schedule) {
        bad.emplace_back("solver.schedule is required (until:increment, ...)");
    } else {
        for (const auto& seg : split(schedule_text, ',')) {
            const auto parts = split(seg, ':');
            TimeSegment t;
            if (parts.size() != 2 || !parse_number(parts[0], t.until) || !parse_number(parts[1], t.increment))
                bad.push_back("solver.schedule: segment '" + seg + "' is not until:increment");
            else so.schedule.push_back(t);
        }
    }
    so.loading_rate = sc.loading_rate;

    if (!trim(patch_text).empty()) {
        for (const auto& item : split(patch_text, ';')) {
            std::vector<double> v;
            for (const auto& word : split(item, ' ')) {
                if (word.empty()) continue;
                double x = 0.0;
                if (parse_number(word, x)) v.push_back(x);
                else v.push_back(std::nan(""));
            }
            if (v.size() != 5 || std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); })) {
                bad.push_back("strength.patches: '" + item + "' is not 'x_min x_max y_min y_max factor'");
                continue;
            }
            sc.strength_patches.push_back({Box{v[0], v[1], v[2], v[3]}, v[4]});
        }
    }

    if (cfg.crack_count < 0) bad.emplace_back("initial_cracks.count must be >= 0");
    if (cfg.crack_count > 0 && !sc.cracks.positions.empty())
        bad.emplace_back("initial_cracks.count and initial_cracks.positions are both given; give one");
    else if (cfg.crack_count > 0)
        sc.cracks.positions = evenly_spaced_cracks(cfg.crack_count, sc.load_x, sc.midspan());
    if (cfg.output.snapshot_every < 1) bad.emplace_back("output.snapshot_every must be >= 1");

    if (sc.length_scale && sc.fracture_energy) {
        // reported once, naming both keys
        sc.fracture_energy.reset();
        bad.emplace_back("formulation.length_scale and formulation.fracture_energy are both given; give exactly one");
    }
    for (auto& v : sc.violations()) bad.push_back("scenario: " + v);
    try {
        so.validate();
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations()) bad.push_back("solver: " + v);
    }

    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "invalid configuration (" << bad.size() << " problem" << (bad.size() == 1 ? "" : "s") << "):";
        for (const auto& b : bad) msg << "\n  " << b;
        throw ConfigError(msg.str(), std::move(bad));
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string(), {"unreadable: " + path.string()});
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str());
}

std::string format_double(double value)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, r.ptr);
}

void atomic_write(const std::filesystem::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string(), {"unwritable: " + tmp.string()});
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ConfigError("write failed for " + tmp.string(), {"unwritable: " + tmp.string()});
    }
    std::filesystem::rename(tmp, path);
}

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return sha256_hex(text.str());
}

std::string probes_csv(const std::vector<StepRecord>& steps)
{
    std::string out = "t_s,w_bar_m,R_N,sigma_mid_Pa,sigma_quarter_top_Pa,max_d,staggered_iters\r\n";
    for (const auto& s : steps) {
        out += format_double(s.time) + ',' + format_double(s.w) + ',' + format_double(s.probes.reaction) + ',' +
               format_double(s.probes.sigma_mid) + ',' + format_double(s.probes.sigma_quarter_top) + ',' +
               format_double(s.max_d) + ',' + std::to_string(s.staggered_iterations) + "\r\n";
    }
    return out;
}

std::string fields_vtk(const PlaneStressModel& model, const Vector& u, const Vector& d, const std::string& title)
{
    const auto& mesh = model.mesh();
    const auto fields = model.element_fields(u, d);
    const std::size_t n = mesh.num_nodes(), m = mesh.num_elements();
    std::string out;
    out.reserve(128 * (n + m));
    out += "# vtk DataFile Version 3.0\n" + title + "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out += "POINTS " + std::to_string(n) + " double\n";
    for (const auto& p : mesh.nodes) out += format_double(p.x) + ' ' + format_double(p.y) + " 0\n";
    out += "CELLS " + std::to_string(m) + ' ' + std::to_string(4 * m) + '\n';
    for (const auto& t : mesh.triangles)
        out += "3 " + std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' + std::to_string(t[2]) + '\n';
    out += "CELL_TYPES " + std::to_string(m) + '\n';
    for (std::size_t e = 0; e < m; ++e) out += "5\n";
    out += "POINT_DATA " + std::to_string(n) + "\nVECTORS u double\n";
    for (std::size_t i = 0; i < n; ++i)
        out += format_double(u[static_cast<Eigen::Index>(2 * i)]) + ' ' +
               format_double(u[static_cast<Eigen::Index>(2 * i + 1)]) + " 0\n";
    out += "SCALARS d double 1\nLOOKUP_TABLE default\n";
    for (double v : fields.nodal_damage) out += format_double(v) + '\n';
    out += "CELL_DATA " + std::to_string(m) + "\nSCALARS sigma_xx double 1\nLOOKUP_TABLE default\n";
    for (double v : fields.sigma_xx) out += format_double(v) + '\n';
    out += "SCALARS psi_plus double 1\nLOOKUP_TABLE default\n";
    for (double v : fields.psi_plus) out += format_double(v) + '\n';
    return out;
}

std::string beam_fields_csv(const LayeredBeamModel& model, const Vector& u, const Vector& d)
{
    std::string out = "x_m,w_m,u_bot_m,phi_bot_rad,u_top_m,phi_top_rad,d_bot,d_top,sigma_bot_surface_Pa,"
                      "sigma_top_surface_Pa\r\n";
    for (const auto& r : model.node_fields(u, d)) {
        out += format_double(r.x) + ',' + format_double(r.w) + ',' + format_double(r.u_bot) + ',' +
               format_double(r.phi_bot) + ',' + format_double(r.u_top) + ',' + format_double(r.phi_top) + ',' +
               format_double(r.d_bot) + ',' + format_double(r.d_top) + ',' + format_double(r.sigma_bot_surface) +
               ',' + format_double(r.sigma_top_surface) + "\r\n";
    }
    return out;
}

RunOutcome execute_run(const RunConfig& config, std::ostream& log)
{
    const auto wall_start = std::chrono::steady_clock::now();
    BuiltScenario built = build_scenario(config.scenario);
    SimulationState initial = built.initial_state();
    apply_initial_cracks(initial, *built.model, config.scenario.cracks, built.glass.length_scale);

    const auto dir = config.output.directory;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw ConfigError("cannot create output directory " + dir.string(), {"unwritable: " + dir.string()});

    RunOutcome outcome;
    auto snapshot = [&](int step, const SimulationState& state) {
        std::ostringstream name;
        if (built.plane_stress) {
            name << "fields_" << std::setw(6) << std::setfill('0') << step << ".vtk";
            atomic_write(dir / name.str(),
                         fields_vtk(*built.plane_stress, state.u, state.d, "glassfrac step " + std::to_string(step)));
        } else {
            name << "fields_" << std::setw(6) << std::setfill('0') << step << ".csv";
            atomic_write(dir / name.str(), beam_fields_csv(*built.beam, state.u, state.d));
        }
        outcome.files.emplace_back(name.str());
    };

    log << "glassfrac " << version() << ": " << built.model->displacement_size() << " displacement dofs, "
        << built.model->damage_size() << " damage dofs, l_c = " << built.glass.length_scale
        << " m, G_f = " << built.glass.fracture_energy << " J/m^2\n";
    int last_snapshot = -1;
    const auto observer = [&](const StepRecord& r, const SimulationState& state) {
        log << "step " << r.step << " t=" << r.time << " w=" << r.w << " R=" << r.probes.reaction
            << " sigma_mid=" << r.probes.sigma_mid << " max_d=" << r.max_d << " iters=" << r.staggered_iterations
            << (r.cutbacks > 0 ? " cutbacks=" + std::to_string(r.cutbacks) : std::string()) << '\n';
        if (r.step % config.output.snapshot_every == 0) {
            snapshot(r.step, state);
            last_snapshot = r.step;
        }
    };
    outcome.result = run_quasistatic(*built.model, config.solver, std::move(initial), observer);
    const auto& result = outcome.result;
    const int final_step = result.steps.empty() ? 0 : result.steps.back().step;
    if (final_step != last_snapshot) snapshot(final_step, result.final_state);

    atomic_write(dir / "probes.csv", probes_csv(result.steps));
    outcome.files.emplace_back("probes.csv");
    outcome.exit_code = result.failed() ? 2 : 0;

    using nlohmann::ordered_json;
    ordered_json manifest;
    manifest["program"] = "glassfrac";
    manifest["version"] = std::string(version());
    ordered_json echo = ordered_json::object();
    for (const auto& [section, keys] : config.echo) {
        ordered_json s = ordered_json::object();
        for (const auto& [k, v] : keys) s[k] = v;
        echo[section] = s;
    }
    manifest["config"] = echo;
    ordered_json assumptions = built.assumptions;
    assumptions.push_back("localization when the reaction drops by " + format_double(config.solver.localization_drop) +
                          " of its peak");
    manifest["assumptions"] = assumptions;
    manifest["calibration"] = {
        {"reduction", std::string(to_string(config.scenario.calibration_reduction.value_or(
                          config.scenario.model == ModelKind::Beam && config.scenario.driver == BeamDriver::Integrated
                              ? Reduction::Beam
                              : Reduction::PlaneStress)))},
        {"length_scale_m", built.glass.length_scale},
        {"fracture_energy_J_per_m2", built.glass.fracture_energy},
        {"heuristic", built.calibration.heuristic},
    };
    ordered_json probes = ordered_json::array();
    for (const auto& p : built.probes)
        probes.push_back({{"name", p.name}, {"requested_x_m", p.requested_x}, {"snapped_x_m", p.snapped_x}, {"y_m", p.y}});
    manifest["probes"] = probes;
    manifest["discretization"] = {
        {"displacement_dofs", built.model->displacement_size()},
        {"damage_dofs", built.model->damage_size()},
    };
    manifest["termination"] = result.termination;
    manifest["failure_message"] = result.failure_message;
    manifest["accepted_steps"] = result.steps.size();
    manifest["peak_reaction_N"] = result.peak_reaction;
    manifest["deflection_at_peak_m"] = result.deflection_at_peak;
    manifest["failure_stress_Pa"] = result.failure_stress;
    ordered_json files = ordered_json::array();
    for (const auto& f : outcome.files) {
        const auto full = dir / f;
        files.push_back({{"name", f.generic_string()},
                         {"bytes", std::filesystem::file_size(full)},
                         {"sha256", sha256_file(full)}});
    }
    manifest["files"] = files;
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    manifest["exit_code"] = outcome.exit_code;
    atomic_write(dir / "manifest.json", manifest.dump(2) + "\n");

    log << "termination: " << result.termination;
    if (!result.failure_message.empty()) log << " (" << result.failure_message << ")";
    log << "; peak R = " << result.peak_reaction << " N, failure stress = " << result.failure_stress << " Pa\n";
    return outcome;
}

}  // namespace glassfrac
