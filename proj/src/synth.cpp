#include "seatrend/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "seatrend/errors.hpp"
#include "seatrend/grd1.hpp"
#include "seatrend/rng.hpp"

#include <nlohmann/json.hpp>

namespace seatrend {

namespace {

// Smooth large-scale random pattern: a handful of low-order harmonics.
std::vector<double> smooth_field(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> amp(0.0, 1.0);
    std::uniform_int_distribution<int> wave(1, 3);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    struct Harmonic {
        double a, ph_lon, ph_lat;
        int p, q;
    };
    std::vector<Harmonic> hs(6);
    for (std::size_t h = 0; h < hs.size(); ++h)
        hs[h] = {amp(rng) / (1.0 + h * 0.5), phase(rng), phase(rng), wave(rng), wave(rng)};

    std::vector<double> f(g.cells());
    for (int j = 0; j < g.n_lat; ++j)
        for (int i = 0; i < g.n_lon; ++i) {
            const double u = (i + 0.5) / g.n_lon;
            const double v = (j + 0.5) / g.n_lat;
            double acc = 0.0;
            for (const auto& h : hs)
                acc += h.a * std::cos(2.0 * std::numbers::pi * h.p * u + h.ph_lon) *
                       std::cos(std::numbers::pi * h.q * v + h.ph_lat);
            f[g.cell_index(j, i)] = acc;
        }
    return f;
}

std::vector<double> ocean_subset(const std::vector<double>& cells, const OceanMask& mask) {
    std::vector<double> out;
    out.reserve(mask.ocean_count());
    for (std::size_t c = 0; c < cells.size(); ++c)
        if (mask.mask[c]) out.push_back(cells[c]);
    return out;
}

// Remove the area-weighted mean, then rescale to the requested rms; scaling
// keeps the mean at zero, so both properties hold on return.
void normalize_pattern(std::vector<double>& v, const LatWeights& w, double target_rms) {
    const double mu = weighted_mean(v, w);
    for (auto& x : v) x -= mu;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        num += w[i] * v[i] * v[i];
        den += w[i];
    }
    const double rms = std::sqrt(num / den);
    const double s = rms > 0.0 ? target_rms / rms : 0.0;
    for (auto& x : v) x *= s;
}

// Remove the least-squares line so the sequence contributes nothing to a
// per-point slope fit over this window.
void orthogonalize_against_line(std::vector<double>& s, std::span<const double> t) {
    double tm = 0.0, sm = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        tm += t[i];
        sm += s[i];
    }
    tm /= s.size();
    sm /= s.size();
    double sty = 0.0, stt = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sty += (t[i] - tm) * (s[i] - sm);
        stt += (t[i] - tm) * (t[i] - tm);
    }
    const double b = sty / stt;
    const double a = sm - b * tm;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] -= a + b * t[i];
}

TimeSeriesStack build_stack(const OceanMask& mask, int start_year, int months,
                            std::span<const double> trend,
                            std::span<const double> seasonal_ampl,
                            std::span<const double> season_shape,
                            std::span<const double> mode_pattern,
                            std::span<const double> oscillation, double noise_amp,
                            std::uint64_t noise_seed) {
    TimeSeriesStack s;
    s.mask = mask;
    s.n_months = months;
    s.start_year = start_year;
    const std::size_t np = mask.ocean_count();
    s.values.resize(np * months);

    for (std::size_t p = 0; p < np; ++p) {
        std::mt19937_64 rng(mix_seed(noise_seed, p));
        std::normal_distribution<double> noise(0.0, 1.0);
        for (int m = 0; m < months; ++m) {
            const double t = month_center(start_year, m);
            double v = trend[p] * t;
            v += seasonal_ampl[p] * season_shape[m % 12];
            if (!mode_pattern.empty()) v += mode_pattern[p] * oscillation[m];
            if (noise_amp > 0.0) v += noise_amp * noise(rng);
            s.at(p, m) = v;
        }
    }
    return s;
}

} // namespace

SynthData gen_synth(const SynthSpec& spec) {
    validate(spec.grid);
    if (spec.months < 24 || spec.months % 12 != 0)
        throw ArgumentError("gen_synth: months must be a multiple of 12, at least 24");
    if (spec.n_models < 2) throw ArgumentError("gen_synth: need at least 2 models");

    SynthData out;
    std::mt19937_64 rng(spec.seed);

    // land: the highest cells of a smooth pattern
    {
        const auto elevation = smooth_field(spec.grid, rng);
        std::vector<double> sorted = elevation;
        const auto n_land = static_cast<std::size_t>(spec.land_fraction * sorted.size());
        std::nth_element(sorted.begin(), sorted.end() - n_land - 1, sorted.end());
        const double sea_level = sorted[sorted.size() - n_land - 1];
        out.mask.grid = spec.grid;
        out.mask.mask.resize(spec.grid.cells());
        for (std::size_t c = 0; c < elevation.size(); ++c)
            out.mask.mask[c] = elevation[c] <= sea_level ? 1 : 0;
    }
    const LatWeights w = area_weights(out.mask);
    const std::size_t np = out.mask.ocean_count();

    out.hindcast_window = YearWindow{spec.start_year, spec.start_year + spec.months / 12 - 1};
    out.projection_window = following_window(out.hindcast_window);

    // planted trends, mm/year, zero weighted mean; the future pattern is a
    // correlated blend of the past one and a fresh field
    out.planted_past = ocean_subset(smooth_field(spec.grid, rng), out.mask);
    out.planted_future = ocean_subset(smooth_field(spec.grid, rng), out.mask);
    normalize_pattern(out.planted_past, w, spec.trend_amp);
    normalize_pattern(out.planted_future, w, spec.trend_amp);
    {
        const double rho = spec.future_past_correlation;
        if (rho < -1.0 || rho > 1.0)
            throw ArgumentError("gen_synth: future/past correlation must lie in [-1, 1]");
        const double mix = std::sqrt(1.0 - rho * rho);
        for (std::size_t p = 0; p < out.planted_future.size(); ++p)
            out.planted_future[p] = rho * out.planted_past[p] + mix * out.planted_future[p];
        normalize_pattern(out.planted_future, w, spec.trend_amp);
    }

    // a fixed seasonal shape, zero-sum and slope-free over the calendar year
    std::vector<double> season(12);
    {
        std::vector<double> tm(12);
        for (int m = 0; m < 12; ++m) {
            season[m] = std::sin(2.0 * std::numbers::pi * m / 12.0) +
                        0.4 * std::cos(4.0 * std::numbers::pi * m / 12.0);
            tm[m] = m;
        }
        orthogonalize_against_line(season, tm);
    }
    std::vector<double> seasonal_ampl = ocean_subset(smooth_field(spec.grid, rng), out.mask);
    for (auto& a : seasonal_ampl) a = spec.seasonal_amp * (0.5 + 0.5 * std::tanh(a));

    // shared oscillation: interannual sine, slope-free within each window
    auto make_oscillation = [&](const YearWindow& win) {
        std::vector<double> osc(spec.months), t(spec.months);
        for (int m = 0; m < spec.months; ++m) {
            t[m] = month_center(win.start_year, m);
            osc[m] = std::sin(2.0 * std::numbers::pi * m / 44.0 + 0.7) +
                     0.3 * std::sin(2.0 * std::numbers::pi * m / 17.0);
        }
        orthogonalize_against_line(osc, t);
        return osc;
    };
    const auto osc_past = make_oscillation(out.hindcast_window);
    std::vector<double> mode_pattern = ocean_subset(smooth_field(spec.grid, rng), out.mask);
    normalize_pattern(mode_pattern, w, spec.mode_amp);

    out.observation = build_stack(out.mask, out.hindcast_window.start_year, spec.months,
                                  out.planted_past, seasonal_ampl, season, mode_pattern,
                                  osc_past, spec.noise_amp, mix_seed(spec.seed, 101));

    // pseudo-models: damped planted pattern + per-model structured bias,
    // identical mapping in both windows; no shared oscillation (ensemble
    // averaging suppresses it)
    const std::vector<double> none;
    for (int m = 0; m < spec.n_models; ++m) {
        std::vector<double> bias = ocean_subset(smooth_field(spec.grid, rng), out.mask);
        normalize_pattern(bias, w, spec.model_bias_amp);

        std::vector<double> past(np), future(np);
        for (std::size_t p = 0; p < np; ++p) {
            past[p] = spec.model_pattern_factor * out.planted_past[p] + bias[p];
            future[p] = spec.model_pattern_factor * out.planted_future[p] + bias[p];
        }

        ModelDataset ds;
        ds.name = "model" + std::to_string(m);
        ds.hindcast = build_stack(out.mask, out.hindcast_window.start_year, spec.months, past,
                                  seasonal_ampl, season, none, none, spec.model_noise_amp,
                                  mix_seed(spec.seed, 200 + m));
        ds.projection = build_stack(out.mask, out.projection_window.start_year, spec.months,
                                    future, seasonal_ampl, season, none, none,
                                    spec.model_noise_amp, mix_seed(spec.seed, 300 + m));
        out.models.push_back(std::move(ds));
    }
    return out;
}

std::filesystem::path write_synth_dir(const SynthData& data, const SynthSpec& spec,
                                      const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    write_grd1(from_stack(data.observation), dir / "obs_hindcast.grd1");
    for (const auto& m : data.models) {
        write_grd1(from_stack(m.hindcast), dir / (m.name + "_hindcast.grd1"));
        write_grd1(from_stack(m.projection), dir / (m.name + "_projection.grd1"));
    }
    write_grd1(from_field(field_from_ocean(data.mask, data.planted_past), data.mask),
               dir / "planted_trend_past.grd1");
    write_grd1(from_field(field_from_ocean(data.mask, data.planted_future), data.mask),
               dir / "planted_trend_future.grd1");

    nlohmann::json manifest;
    manifest["kind"] = "synthetic-suite";
    manifest["grid"] = {{"n_lon", spec.grid.n_lon}, {"n_lat", spec.grid.n_lat},
                        {"lon0", spec.grid.lon0},   {"lat0", spec.grid.lat0},
                        {"d_lon", spec.grid.d_lon}, {"d_lat", spec.grid.d_lat}};
    manifest["seed"] = spec.seed;
    manifest["months"] = spec.months;
    manifest["n_models"] = spec.n_models;
    manifest["amplitudes"] = {{"trend", spec.trend_amp},
                              {"seasonal", spec.seasonal_amp},
                              {"mode", spec.mode_amp},
                              {"noise", spec.noise_amp},
                              {"model_pattern_factor", spec.model_pattern_factor},
                              {"model_bias", spec.model_bias_amp},
                              {"model_noise", spec.model_noise_amp}};
    manifest["hindcast_window"] = {{"start_year", data.hindcast_window.start_year},
                                   {"end_year", data.hindcast_window.end_year}};
    manifest["projection_window"] = {{"start_year", data.projection_window.start_year},
                                     {"end_year", data.projection_window.end_year}};
    manifest["planted_trend_past"] = "planted_trend_past.grd1";
    manifest["planted_trend_future"] = "planted_trend_future.grd1";
    {
        std::ofstream mf(dir / "synth_manifest.json");
        mf << manifest.dump(2) << "\n";
    }

    nlohmann::json cfg;
    cfg["observation"] = "obs_hindcast.grd1";
    cfg["models"] = nlohmann::json::array();
    for (const auto& m : data.models)
        cfg["models"].push_back({{"name", m.name},
                                 {"hindcast", m.name + "_hindcast.grd1"},
                                 {"projection", m.name + "_projection.grd1"}});
    cfg["hindcast_window"] = manifest["hindcast_window"];
    cfg["projection_window"] = manifest["projection_window"];
    cfg["strategy"] = "spectral";
    cfg["k"] = 4;
    cfg["seed"] = 1234;
    cfg["threads"] = 1;
    cfg["mc_passes"] = 100;
    cfg["shap_background"] = 100;
    cfg["architecture"] = {{"large", {32, 16}}, {"small", {32, 16}}};
    cfg["train"] = {{"learning_rate", 3e-3}, {"epochs", 200},  {"batch_size", 64},
                    {"l2", 5e-6},            {"dropout", 0.2}, {"patience", 0},
                    {"val_fraction", 0.1}};
    const fs::path cfg_path = dir / "config.json";
    {
        std::ofstream cf(cfg_path);
        cf << cfg.dump(2) << "\n";
    }
    return cfg_path;
}

} // namespace seatrend
