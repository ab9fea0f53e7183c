#include "glassfrac/errors.hpp"
#include "glassfrac/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>

using namespace glassfrac;

namespace {

PhaseFieldKind parse_kind(const std::string& s)
{
    if (s == "pf-b") return PhaseFieldKind::PfB;
    if (s == "pf-m") return PhaseFieldKind::PfM;
    if (s == "pf-p") return PhaseFieldKind::PfP;
    throw ConfigError("unknown kind '" + s + "' (pf-b, pf-m, pf-p)");
}

Reduction parse_reduction(const std::string& s)
{
    if (s == "plane-stress") return Reduction::PlaneStress;
    if (s == "beam") return Reduction::Beam;
    throw ConfigError("unknown reduction '" + s + "' (plane-stress, beam)");
}

void print_violations(const ConfigError& e)
{
    std::cerr << "error: " << e.what() << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Phase-field fracture of monolithic and laminated glass beams"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a four-point bending simulation from a config file");
    std::string config_path;
    std::string output_override;
    bool quiet = false;
    run->add_option("config", config_path, "INI run file")->required();
    run->add_option("-o,--output", output_override, "output directory (overrides output.directory)");
    run->add_flag("-q,--quiet", quiet, "suppress the per-step progress log");

    auto* cal = app.add_subcommand("calibrate", "relate l_c and G_f through the homogeneous strength");
    std::string kind = "pf-p", reduction = "plane-stress";
    std::optional<double> lc, lc_mm, gf;
    double young = 70e9, strength = 45e6;
    std::optional<double> young_gpa, strength_mpa;
    bool cal_json = false;
    cal->add_option("--kind", kind, "pf-b, pf-m or pf-p")->capture_default_str();
    cal->add_option("--reduction", reduction, "plane-stress or beam")->capture_default_str();
    auto* o_lc = cal->add_option("--lc", lc, "length scale, m");
    auto* o_lc_mm = cal->add_option("--lc-mm", lc_mm, "length scale, mm");
    cal->add_option("--gf", gf, "fracture energy, J/m^2");
    o_lc->excludes(o_lc_mm);
    auto* o_e = cal->add_option("--young-modulus", young, "Young's modulus, Pa")->capture_default_str();
    auto* o_e_gpa = cal->add_option("--young-modulus-gpa", young_gpa, "Young's modulus, GPa");
    o_e->excludes(o_e_gpa);
    auto* o_ft = cal->add_option("--ft", strength, "tensile strength, Pa")->capture_default_str();
    auto* o_ft_mpa = cal->add_option("--ft-mpa", strength_mpa, "tensile strength, MPa");
    o_ft->excludes(o_ft_mpa);
    cal->add_flag("--json", cal_json, "machine-readable output");

    auto* probe = app.add_subcommand("material-probe", "equivalent elastic interlayer for a load duration");
    std::string interlayer;
    double duration = 0.0, temperature = 20.0;
    bool probe_json = false;
    probe->add_option("interlayer", interlayer, "eva, pvb or a Prony CSV (tau_s,G_Pa)")->required();
    probe->add_option("duration", duration, "load duration, s")->required();
    probe->add_option("temperature", temperature, "temperature, degC")->required();
    probe->add_flag("--json", probe_json, "machine-readable output");

    auto* ver = app.add_subcommand("version", "print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*ver) {
            std::cout << "glassfrac " << version() << '\n';
            return 0;
        }
        if (*cal) {
            const int given = (lc || lc_mm ? 1 : 0) + (gf ? 1 : 0);
            if (given != 1) throw ConfigError("give exactly one of --lc/--lc-mm and --gf");
            if (young_gpa) young = *young_gpa * 1e9;
            if (strength_mpa) strength = *strength_mpa * 1e6;
            if (lc_mm) lc = *lc_mm * 1e-3;
            const auto k = parse_kind(kind);
            const auto r = parse_reduction(reduction);
            const auto c = lc ? calibrate(k, r, CalibrationInput::LengthScale, *lc, young, strength)
                              : calibrate(k, r, CalibrationInput::FractureEnergy, *gf, young, strength);
            const double peak = homogeneous_peak_stress(k, young, c.fracture_energy, c.length_scale);
            if (cal_json) {
                nlohmann::ordered_json j{{"kind", kind},
                                         {"reduction", reduction},
                                         {"young_modulus_Pa", young},
                                         {"tensile_strength_Pa", strength},
                                         {"length_scale_m", c.length_scale},
                                         {"fracture_energy_J_per_m2", c.fracture_energy},
                                         {"homogeneous_peak_stress_Pa", peak},
                                         {"heuristic", c.heuristic}};
                std::cout << j.dump(2) << '\n';
            } else {
                std::cout << "kind                      " << kind << '\n'
                          << "reduction                 " << reduction << '\n'
                          << "length scale l_c          " << format_double(c.length_scale) << " m\n"
                          << "fracture energy G_f       " << format_double(c.fracture_energy) << " J/m^2\n"
                          << "homogeneous peak stress   " << format_double(peak) << " Pa\n";
                if (c.heuristic) std::cout << "note: PF-M uses the PF-B relation\n";
            }
            return 0;
        }
        if (*probe) {
            InterlayerModel model;
            if (interlayer == "eva") model = eva_interlayer();
            else if (interlayer == "pvb") model = pvb_interlayer();
            else {
                model = eva_interlayer(); // WLF constants are not part of a Prony CSV
                model.prony = read_prony_csv(interlayer);
            }
            const double a_t = wlf_shift_factor(model.wlf, temperature);
            const double g = equivalent_shear_modulus(model, duration, temperature);
            const auto e = equivalent_elastic_constants(model, duration, temperature);
            if (probe_json) {
                nlohmann::ordered_json j{{"interlayer", interlayer},
                                         {"duration_s", duration},
                                         {"temperature_C", temperature},
                                         {"shift_factor", a_t},
                                         {"shear_modulus_Pa", g},
                                         {"young_modulus_Pa", e.young_modulus},
                                         {"poisson_ratio", e.poisson_ratio}};
                std::cout << j.dump(2) << '\n';
            } else {
                std::cout << "shift factor a_T          " << format_double(a_t) << '\n'
                          << "shear modulus G(t,T)      " << format_double(g) << " Pa\n"
                          << "Young's modulus E_eq      " << format_double(e.young_modulus) << " Pa\n"
                          << "Poisson ratio             " << format_double(e.poisson_ratio) << '\n';
            }
            return 0;
        }
        if (*run) {
            auto config = load_run_config(config_path);
            if (!output_override.empty()) config.output.directory = output_override;
            std::ostream null_stream(nullptr);
            const auto outcome = execute_run(config, quiet ? null_stream : std::cerr);
            return outcome.exit_code;
        }
    } catch (const ConfigError& e) {
        print_violations(e);
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const QueryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
