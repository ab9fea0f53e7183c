#include "glassfrac/errors.hpp"
#include "glassfrac/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace glassfrac;

namespace {

const char* kMinimal = R"([scenario]
layup = monolith
element_size = 10e-3
band_size = 2e-3

[formulation]
kind = pf-p
length_scale = 4e-3

[solver]
schedule = 10:5
)";

std::string read(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("glassfrac_test_io_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("minimal config parses with defaults")
{
    const auto cfg = parse_run_config(kMinimal);
    CHECK(cfg.scenario.layup == Layup::Monolith);
    CHECK(cfg.scenario.formulation.kind == PhaseFieldKind::PfP);
    CHECK(cfg.scenario.length_scale == 4e-3);
    CHECK_FALSE(cfg.scenario.fracture_energy.has_value());
    REQUIRE(cfg.solver.schedule.size() == 1);
    CHECK(cfg.solver.schedule[0].until == 10.0);
    CHECK(cfg.solver.schedule[0].increment == 5.0);
    CHECK(cfg.output.snapshot_every == 25);
    CHECK(cfg.echo.at("formulation").at("length_scale") == "4e-3");
}

TEST_CASE("full config round trip")
{
    const auto cfg = parse_run_config(R"([scenario]
model = beam
layup = laminate
interlayer = pvb
temperature = 30
symmetry = full
beam_driver = surface
support_x = 0.06
load_x = 0.4

[formulation]
kind = pf-b
split = spectral
scheme = hybrid
fracture_energy = 100
tensile_strength = 40e6
residual_stiffness = 0
calibration_reduction = plane-stress

[strength]
patches = 0.49 0.51 0 0.005 0.8; 0.2 0.3 0 1 0.9

[solver]
energy_tolerance = 1e-5
max_cutbacks = 3
schedule = 1:0.1, 1.2:0.01, 1.25:0.001

[output]
directory = somewhere
snapshot_every = 7
quarter_probe_x = 0.25

[initial_cracks]
count = 3
)");
    const auto& s = cfg.scenario;
    CHECK(s.model == ModelKind::Beam);
    CHECK(s.interlayer == InterlayerKind::Pvb);
    CHECK(s.symmetry == Symmetry::Full);
    CHECK(s.driver == BeamDriver::Surface);
    CHECK(s.formulation.kind == PhaseFieldKind::PfB);
    CHECK(s.formulation.split == EnergySplit::Spectral);
    CHECK(s.formulation.scheme == StaggeredScheme::Hybrid);
    CHECK(s.fracture_energy == 100.0);
    CHECK(s.calibration_reduction == Reduction::PlaneStress);
    CHECK(s.strength_patches.size() == 2);
    CHECK(s.strength_patches[0].factor == 0.8);
    CHECK(cfg.solver.schedule.size() == 3);
    CHECK(cfg.solver.max_cutbacks == 3);
    CHECK(cfg.output.directory == "somewhere");
    CHECK(s.quarter_probe_x == 0.25);
    REQUIRE(s.cracks.positions.size() == 3);
    CHECK(s.cracks.positions[0] == doctest::Approx(0.4 + 0.15 / 6.0));
}

TEST_CASE("config errors list every violation")
{
    SUBCASE("both length scale and fracture energy name both keys")
    {
        std::string text = kMinimal;
        text.insert(text.find("[solver]"), "fracture_energy = 100\n\n");
        try {
            parse_run_config(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string what = e.what();
            CHECK(what.find("length_scale") != std::string::npos);
            CHECK(what.find("fracture_energy") != std::string::npos);
            CHECK(e.violations().size() == 1);
        }
        // under [solver] the same key is unknown
        CHECK_THROWS_AS(parse_run_config(std::string(kMinimal) + "fracture_energy = 100\n"), ConfigError);
    }

    SUBCASE("several independent problems")
    {
        try {
            parse_run_config(R"([scenario]
layup = sandwich
width = -1
bogus = 3

[formulation]
kind = pf-q
length_scale = abc

[colors]
x = 1
)");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            // layup, width, bogus key, kind, length_scale, unknown section, missing schedule
            CHECK(e.violations().size() >= 7);
            const std::string what = e.what();
            for (const char* key : {"layup", "width", "bogus", "kind", "length_scale", "colors", "schedule"})
                CHECK_MESSAGE(what.find(key) != std::string::npos, key);
        }
    }

    SUBCASE("unreadable file")
    {
        CHECK_THROWS_AS(load_run_config("/nonexistent/run.ini"), ConfigError);
    }
}

TEST_CASE("doubles are written with round-trip precision")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(mant(rng), ex(rng));
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("probes csv has a header and one CRLF row per step")
{
    std::vector<StepRecord> steps(3);
    for (int i = 0; i < 3; ++i) {
        steps[i].time = 0.1 * (i + 1);
        steps[i].w = 3e-5 * steps[i].time;
        steps[i].probes.reaction = 1.0 / 3.0 * i;
        steps[i].staggered_iterations = i + 1;
    }
    const auto csv = probes_csv(steps);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t_s,w_bar_m,R_N,sigma_mid_Pa,sigma_quarter_top_Pa,max_d,staggered_iters\r");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.back() == '\r');
        CHECK(std::count(line.begin(), line.end(), ',') == 6);
        ++rows;
    }
    CHECK(rows == 3);
    CHECK(csv.find(format_double(1.0 / 3.0)) != std::string::npos);
}

TEST_CASE("sha256 and atomic writes")
{
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const auto dir = scratch("atomic");
    atomic_write(dir / "a.txt", "first");
    atomic_write(dir / "a.txt", "second");
    CHECK(read(dir / "a.txt") == "second");
    CHECK_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
    CHECK(sha256_file(dir / "a.txt") == sha256_hex("second"));
}

TEST_CASE("vtk snapshot layout")
{
    FourPointScenario spec;
    spec.element_size = 20e-3;
    spec.band_size = 5e-3;
    spec.length_scale = 10e-3;
    const auto built = build_scenario(spec);
    const auto state = built.initial_state();
    const auto text = fields_vtk(*built.plane_stress, state.u, state.d, "t");
    const auto& mesh = built.plane_stress->mesh();
    CHECK(text.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
    CHECK(text.find("POINTS " + std::to_string(mesh.num_nodes()) + " double") != std::string::npos);
    CHECK(text.find("CELLS " + std::to_string(mesh.num_elements()) + " " + std::to_string(4 * mesh.num_elements())) !=
          std::string::npos);
    for (const char* field : {"VECTORS u double", "SCALARS d double", "SCALARS sigma_xx double", "SCALARS psi_plus double"})
        CHECK(text.find(field) != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') ==
          static_cast<long>(4 + 1 + mesh.num_nodes() + 1 + mesh.num_elements() + 1 + mesh.num_elements() + 2 +
                            mesh.num_nodes() + 2 + mesh.num_nodes() + 3 + mesh.num_elements() + 2 +
                            mesh.num_elements()));
}

TEST_CASE("beam fields csv")
{
    FourPointScenario spec;
    spec.model = ModelKind::Beam;
    spec.layup = Layup::Laminate;
    spec.element_size = 20e-3;
    spec.band_size = 5e-3;
    spec.length_scale = 10e-3;
    const auto built = build_scenario(spec);
    const auto state = built.initial_state();
    const auto csv = beam_fields_csv(*built.beam, state.u, state.d);
    CHECK(csv.rfind("x_m,w_m,", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == built.beam->num_nodes() + 1);
}

TEST_CASE("execute_run writes consistent outputs and is deterministic")
{
    auto cfg = parse_run_config(R"([scenario]
layup = monolith
element_size = 20e-3
band_size = 5e-3

[formulation]
length_scale = 10e-3

[solver]
schedule = 300:30

[output]
snapshot_every = 4
)");
    const auto dir_a = scratch("run_a");
    const auto dir_b = scratch("run_b");
    std::ostringstream log;
    cfg.output.directory = dir_a;
    const auto a = execute_run(cfg, log);
    cfg.output.directory = dir_b;
    const auto b = execute_run(cfg, log);
    CHECK(a.exit_code == 0);
    CHECK_FALSE(a.result.steps.empty());
    CHECK(read(dir_a / "probes.csv") == read(dir_b / "probes.csv"));
    const auto csv = read(dir_a / "probes.csv");
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == a.result.steps.size() + 1);
    CHECK(std::filesystem::exists(dir_a / "fields_000004.vtk"));
    CHECK(std::filesystem::exists(dir_a / "manifest.json"));
    const auto manifest = read(dir_a / "manifest.json");
    CHECK(manifest.find(sha256_file(dir_a / "probes.csv")) != std::string::npos);
    CHECK(manifest.find("\"assumptions\"") != std::string::npos);
    CHECK(manifest.find("support_x") != std::string::npos);
    CHECK(manifest.find("localization") != std::string::npos);
    CHECK(log.str().find("termination") != std::string::npos);
}
