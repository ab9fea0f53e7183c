#include "glassfrac/materials.hpp"

#include "glassfrac/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace glassfrac {

void GlassMaterial::validate() const
{
    std::vector<std::string> bad;
    if (!(young_modulus > 0.0)) bad.emplace_back("young_modulus must be > 0");
    if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5)) bad.emplace_back("poisson_ratio must lie in [0, 0.5)");
    if (!(tensile_strength > 0.0)) bad.emplace_back("tensile_strength must be > 0");
    if (!(fracture_energy > 0.0)) bad.emplace_back("fracture_energy must be > 0");
    if (!(length_scale > 0.0)) bad.emplace_back("length_scale must be > 0");
    if (!bad.empty()) throw ConfigError("invalid glass material", std::move(bad));
}

void StrengthField::validate() const
{
    std::vector<std::string> bad;
    if (!(base_strength > 0.0)) bad.emplace_back("base_strength must be > 0");
    for (std::size_t i = 0; i < patches.size(); ++i) {
        const auto& p = patches[i];
        if (!(p.factor > 0.0 && p.factor <= 1.0))
            bad.push_back("strength patch " + std::to_string(i) + ": factor must lie in (0, 1]");
        if (!(p.region.x_min <= p.region.x_max && p.region.y_min <= p.region.y_max))
            bad.push_back("strength patch " + std::to_string(i) + ": empty region");
    }
    if (!bad.empty()) throw ConfigError("invalid strength field", std::move(bad));
}

double effective_strength(const StrengthField& field, Point2 point)
{
    double factor = 1.0;
    for (const auto& patch : field.patches)
        if (patch.region.contains(point)) factor = std::min(factor, patch.factor);
    return field.base_strength * factor;
}

void PronySeries::validate() const
{
    std::vector<std::string> bad;
    if (!(long_term_modulus >= 0.0)) bad.emplace_back("long-term modulus must be >= 0");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (!(terms[i].relaxation_time > 0.0))
            bad.push_back("term " + std::to_string(i) + ": relaxation time must be > 0");
        if (!(terms[i].shear_modulus > 0.0))
            bad.push_back("term " + std::to_string(i) + ": shear modulus must be > 0");
        if (i > 0 && !(terms[i].relaxation_time > terms[i - 1].relaxation_time))
            bad.push_back("term " + std::to_string(i) + ": relaxation times must be strictly increasing");
    }
    if (!bad.empty()) throw ConfigError("invalid Prony series", std::move(bad));
}

double PronySeries::instantaneous_modulus() const
{
    double g = long_term_modulus;
    for (const auto& t : terms) g += t.shear_modulus;
    return g;
}

void InterlayerModel::validate() const
{
    prony.validate();
    if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5))
        throw ConfigError("interlayer poisson_ratio must lie in [0, 0.5)");
}

double wlf_shift_factor(const WlfShift& wlf, double temperature)
{
    const double dt = temperature - wlf.reference_temperature;
    const double denom = wlf.c2 + dt;
    if (denom == 0.0 || !std::isfinite(denom)) {
        std::ostringstream msg;
        msg << "WLF shift is singular at temperature " << temperature << " degC (C2 + T - T0 = 0)";
        throw DomainError(msg.str());
    }
    if (dt == 0.0) return 1.0;
    return std::pow(10.0, -wlf.c1 * dt / denom);
}

double equivalent_shear_modulus(const InterlayerModel& model, double duration, double temperature)
{
    if (!(duration >= 0.0)) throw DomainError("load duration must be >= 0");
    const double a_t = wlf_shift_factor(model.wlf, temperature);
    const double half = 0.5 * duration;
    double g = model.prony.long_term_modulus;
    for (const auto& term : model.prony.terms) g += term.shear_modulus * std::exp(-half / (a_t * term.relaxation_time));
    return g;
}

ElasticConstants equivalent_elastic_constants(const InterlayerModel& model, double duration, double temperature)
{
    const double g = equivalent_shear_modulus(model, duration, temperature);
    return {2.0 * g * (1.0 + model.poisson_ratio), model.poisson_ratio};
}

namespace {

PronySeries decade_series(double long_term_kpa, int first_exponent, std::initializer_list<double> moduli_kpa)
{
    PronySeries s;
    s.long_term_modulus = long_term_kpa * 1e3;
    int e = first_exponent;
    for (double g : moduli_kpa) s.terms.push_back({std::pow(10.0, e++), g * 1e3});
    return s;
}

}  // namespace

InterlayerModel eva_interlayer()
{
    InterlayerModel m;
    m.prony = decade_series(682.18, -9,
                            {6933.9, 3898.6, 2289.2, 1672.7, 761.6, 2401.0, 65.2, 248.0, 575.6, 56.3, 188.6,
                             445.1, 300.1, 401.6, 348.1, 111.6, 127.2, 137.8, 50.5, 322.9, 100.0, 199.9});
    m.wlf = {20.0, 339.102, 1185.816};
    return m;
}

InterlayerModel pvb_interlayer()
{
    InterlayerModel m;
    m.prony = decade_series(232.26, -5,
                            {1782124.2, 519208.7, 546176.8, 216893.2, 13618.3, 4988.3, 1663.8, 587.2, 258.0,
                             63.8, 168.4});
    m.wlf = {20.0, 8.635, 42.422};
    return m;
}

namespace {

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, const std::string& where)
{
    std::string t = trim(text);
    if (t == "inf" || t == "Inf" || t == "INF" || t == "infinity") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError("cannot parse number '" + t + "' at " + where);
    return v;
}

}  // namespace

PronySeries read_prony_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open Prony CSV " + path.string());
    PronySeries series;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || trim(line).front() == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
        const std::string a = trim(line.substr(0, comma));
        const std::string b = trim(line.substr(comma + 1));
        if (!header_seen) {
            header_seen = true;
            if (a == "tau_s" && b == "G_Pa") continue;
            throw ConfigError(path.string() + ": header must be 'tau_s, G_Pa'");
        }
        const std::string where = path.string() + ":" + std::to_string(lineno);
        const double tau = parse_number(a, where);
        const double g = parse_number(b, where);
        if (std::isinf(tau))
            series.long_term_modulus = g;
        else
            series.terms.push_back({tau, g});
    }
    std::sort(series.terms.begin(), series.terms.end(),
              [](const PronyTerm& l, const PronyTerm& r) { return l.relaxation_time < r.relaxation_time; });
    series.validate();
    return series;
}

}  // namespace glassfrac
