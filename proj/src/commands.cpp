// Copyright 2026 The relaxtyp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relaxtyp/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "relaxtyp/decomposition_io.hpp"
#include "relaxtyp/slowest_modes.hpp"
#include "relaxtyp/typicality.hpp"

namespace relaxtyp {

using nlohmann::json;

namespace {

constexpr Index kDenseLimit = 4096;

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const RunConfig& config, const std::vector<std::string>& columns)
        : out_(config.output, std::ios::trunc)
    {
        if (!out_) {
            throw ConfigError("output: cannot write " + config.output);
        }
        out_ << "# relaxtyp " << RELAXTYP_VERSION << " command=" << command_name(config.command)
             << " config_hash=" << config.hash()
             << " seed=" << (config.seed ? std::to_string(*config.seed) : "none") << "\n";
        row(columns);
    }

    void row(const std::vector<std::string>& cells)
    {
        for (size_t i = 0; i < cells.size(); ++i) {
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

void write_summary(const RunConfig& config, json summary)
{
    summary["tool"] = "relaxtyp";
    summary["version"] = RELAXTYP_VERSION;
    summary["command"] = command_name(config.command);
    summary["config_hash"] = config.hash();
    summary["seed"] = config.seed ? json(*config.seed) : json(nullptr);
    std::ofstream out(config.summary_path(), std::ios::trunc);
    if (!out) {
        throw ConfigError("summary: cannot write " + config.summary_path());
    }
    out << summary.dump(2) << "\n";
}

class Logger {
public:
    explicit Logger(const RunOptions& o) : quiet_(o.quiet), out_(o.log ? o.log : &std::cerr) {}

    void operator()(const std::string& msg) const
    {
        if (!quiet_) {
            *out_ << "relaxtyp: " << msg << std::endl;
        }
    }

private:
    bool quiet_;
    std::ostream* out_;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string hex(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Dense (optionally cached) or iterative decomposition holding at least `needed` modes.
SpectralDecomposition decompose(const RunConfig& config, const ModelConfig& mc,
                                const LindbladModel& model, Index needed, const Logger& log)
{
    const Index d = model.dim;
    if (config.iterative) {
        if (needed > d * d) {
            throw ConfigError("modes: iterative path cannot return all modes");
        }
        SlowestModesOptions o;
        o.n_modes = std::max<Index>(needed, 2);
        o.normalization = config.normalization;
        log("iterative slowest modes, d = " + std::to_string(d));
        return slowest_modes(model, o);
    }
    if (d * d > kDenseLimit) {
        throw ConfigError("model.N: dense decomposition is limited to d^2 <= " +
                          std::to_string(kDenseLimit) + " (got d^2 = " + std::to_string(d * d) +
                          "); set \"iterative\": true for the slowest-mode path");
    }
    DecomposeOptions o;
    o.normalization = config.normalization;
    o.max_modes = needed >= d * d ? 0 : needed;
    if (mc.builder == ModelBuilder::Chain) {
        o.splitter = chain_splitter(mc.chain);
    }
    std::string cache_path;
    const std::uint64_t h = model_hash(model, o);
    if (!config.cache_dir.empty()) {
        std::filesystem::create_directories(config.cache_dir);
        cache_path = (std::filesystem::path(config.cache_dir) / (hex(h) + ".rtsd")).string();
        if (auto cached = load_decomposition(cache_path, h)) {
            log("loaded cached decomposition " + cache_path);
            return std::move(*cached);
        }
    }
    log("dense decomposition, d = " + std::to_string(d));
    SpectralDecomposition dec = spectral_decompose(model, o);
    if (!cache_path.empty()) {
        save_decomposition(cache_path, dec, h);
    }
    return dec;
}

Index needed_modes(const RunConfig& config, Index d)
{
    return std::min<Index>(d * d, std::max(2, config.modes.max_mode(d)));
}

int run_spectrum(const RunConfig& config, const Logger& log)
{
    const ModelConfig& mc = *config.model;
    const LindbladModel model = build_model(mc);
    const Index d = model.dim;
    const SpectralDecomposition dec =
        decompose(config, mc, model, config.iterative ? needed_modes(config, d) : d * d, log);

    std::vector<std::string> cols{"mode",   "lambda_re", "lambda_im",  "cluster_size",
                                  "norm_L", "norm_R",    "trace_L_re", "trace_L_im", "O_k"};
    if (config.max_overlap) {
        cols.push_back("max_overlap");
    }
    CsvWriter csv(config, cols);
    double max_o = 0.0;
    for (int k = 1; k <= dec.size(); ++k) {
        const Complex tr = dec.left(k).trace();
        std::vector<std::string> row{std::to_string(k),
                                     num(dec.eigenvalue(k).real()),
                                     num(dec.eigenvalue(k).imag()),
                                     std::to_string(dec.cluster_size(k)),
                                     num(dec.left(k).norm()),
                                     num(dec.right(k).norm()),
                                     num(tr.real()),
                                     num(tr.imag()),
                                     num(dec.condition_number(k))};
        if (config.max_overlap) {
            row.push_back(num(max_overlap(dec, k)));
        }
        csv.row(row);
        max_o = std::max(max_o, dec.condition_number(k));
    }
    json s;
    s["model"] = mc.name();
    s["N"] = mc.qubits();
    s["d"] = d;
    s["n_modes"] = dec.size();
    s["gap"] = dec.size() > 1 ? std::abs(dec.eigenvalue(2).real()) : 0.0;
    s["max_condition_number"] = max_o;
    if (dec.size() > 1) {
        const RelaxationTime tau = typical_relaxation_time(dec, config.eps);
        s["typical_relaxation_time"] = {{"time", tau.time}, {"mode", tau.mode}, {"eps", config.eps}};
    }
    write_summary(config, s);
    return kExitOk;
}

int run_typicality(const RunConfig& config, const Logger& log)
{
    const ModelConfig& mc = *config.model;
    const LindbladModel model = build_model(mc);
    const Index d = model.dim;
    const SpectralDecomposition dec = decompose(config, mc, model, needed_modes(config, d), log);
    const std::vector<int> modes = config.modes.resolve(dec.size());

    CsvWriter csv(config, {"ensemble", "d", "N", "mode", "mean_re", "mean_im", "var_analytic",
                           "var_mc", "se", "n_samples", "seed", "mc_mean_re", "mc_mean_im",
                           "var_se"});
    json s;
    s["model"] = mc.name();
    s["N"] = mc.qubits();
    s["d"] = d;
    json per_ensemble = json::array();
    for (size_t e = 0; e < config.ensembles.size(); ++e) {
        const EnsembleSpec spec = make_ensemble(config.ensembles[e], d);
        const std::uint64_t seed = derive_seed(*config.seed, e);
        log("sampling " + std::to_string(config.n_samples) + " states from " +
            config.ensembles[e].name());
        const auto stats = mc_moments(dec, spec, modes, config.n_samples, seed, config.threads);
        json rows = json::array();
        for (const auto& st : stats) {
            csv.row({config.ensembles[e].name(), std::to_string(d), std::to_string(mc.qubits()),
                     std::to_string(st.mode), num(st.mean.real()), num(st.mean.imag()),
                     num(st.variance), num(st.mc_variance), num(st.mc_standard_error),
                     std::to_string(st.mc_samples), std::to_string(seed), num(st.mc_mean.real()),
                     num(st.mc_mean.imag()), num(st.mc_variance_standard_error)});
            const VarianceBounds b = variance_upper_bounds(dec, st.mode);
            rows.push_back({{"mode", st.mode},
                            {"var_analytic", st.variance},
                            {"var_mc", st.mc_variance},
                            {"var_se", st.mc_variance_standard_error},
                            {"haar_bound", b.haar_bound},
                            {"hs_bound", b.hs_bound}});
        }
        json entry{{"ensemble", config.ensembles[e].name()}, {"modes", rows}};
        if (dec.size() >= 2) {
            TsmeOptions to;
            to.tol_mean = config.tol_mean;
            to.tol_var = config.tol_var;
            const TsmeDiagnostic t =
                tsme_diagnostic(dec, closed_form_moments(dec, spec, 2).variance, to);
            entry["tsme"] = {{"flag", t.tsme},
                             {"mean_a2", t.mean_a2},
                             {"tol_mean", t.tol_mean},
                             {"tol_var", t.tol_var},
                             {"ratio_ok_modes", t.ratio_ok_modes}};
        }
        per_ensemble.push_back(entry);
    }
    s["ensembles"] = per_ensemble;
    write_summary(config, s);
    return kExitOk;
}

int run_sweep(const RunConfig& config, const Logger& log)
{
    const ModelConfig& base = *config.model;
    CsvWriter csv(config, {"N", "d", "beta", "ensemble", "mode", "mean_re", "mean_im",
                           "var_analytic", "var_mc", "se", "O_k", "runtime_seconds", "seed"});
    struct Series {
        std::vector<ScalingPoint> analytic;
        std::vector<ScalingPoint> mc;
    };
    std::map<std::pair<size_t, int>, Series> series;
    json tsme = json::array();
    for (int n = config.sweep_min; n <= config.sweep_max; ++n) {
        const auto t0 = std::chrono::steady_clock::now();
        const ModelConfig mc = base.with_qubits(n);
        const LindbladModel model = build_model(mc);
        const Index d = model.dim;
        const SpectralDecomposition dec = decompose(config, mc, model, needed_modes(config, d), log);
        const std::vector<int> modes = config.modes.resolve(dec.size());
        const double decompose_seconds = seconds_since(t0);
        const std::uint64_t point_seed = derive_seed(config.seed.value_or(0), static_cast<std::uint64_t>(n));
        for (size_t e = 0; e < config.ensembles.size(); ++e) {
            const auto te = std::chrono::steady_clock::now();
            const EnsembleSpec spec = make_ensemble(config.ensembles[e], d);
            const std::uint64_t seed = derive_seed(point_seed, e);
            std::vector<OverlapStatistics> stats;
            if (config.n_samples > 0) {
                stats = mc_moments(dec, spec, modes, config.n_samples, seed, config.threads);
            }
            const double runtime = decompose_seconds + seconds_since(te);
            for (size_t i = 0; i < modes.size(); ++i) {
                const int k = modes[i];
                const Moments m = closed_form_moments(dec, spec, k);
                const bool have_mc = !stats.empty();
                csv.row({std::to_string(n), std::to_string(d), num(mc.beta()),
                         config.ensembles[e].name(), std::to_string(k), num(m.mean.real()),
                         num(m.mean.imag()), num(m.variance),
                         have_mc ? num(stats[i].mc_variance) : "nan",
                         have_mc ? num(stats[i].mc_standard_error) : "nan",
                         num(dec.condition_number(k)), num(config.record_runtime ? runtime : 0.0),
                         have_mc ? std::to_string(seed) : "none"});
                auto& sr = series[{e, k}];
                sr.analytic.push_back({static_cast<double>(d), m.variance});
                if (have_mc) {
                    sr.mc.push_back({static_cast<double>(d), stats[i].mc_variance});
                }
                if (k == 2) {
                    TsmeOptions to;
                    to.tol_mean = config.tol_mean;
                    to.tol_var = config.tol_var;
                    const TsmeDiagnostic t = tsme_diagnostic(dec, m.variance, to);
                    tsme.push_back({{"N", n},
                                    {"ensemble", config.ensembles[e].name()},
                                    {"flag", t.tsme},
                                    {"mean_a2", t.mean_a2},
                                    {"var_a2", m.variance},
                                    {"ratio_ok_modes", t.ratio_ok_modes.size()}});
                }
            }
        }
        log("N = " + std::to_string(n) + " done");
    }

    auto fit_json = [](const std::vector<ScalingPoint>& pts) -> json {
        if (pts.size() < 3) {
            return nullptr;
        }
        try {
            const ScalingFit f = scaling_fit(pts);
            return {{"exponent", f.exponent},
                    {"intercept", f.intercept},
                    {"r_squared", f.r_squared},
                    {"regime", regime_name(f.regime)}};
        } catch (const Error& e) {
            return {{"error", e.what()}};
        }
    };
    json fits = json::array();
    for (const auto& [key, sr] : series) {
        fits.push_back({{"ensemble", config.ensembles[key.first].name()},
                        {"mode", key.second},
                        {"analytic", fit_json(sr.analytic)},
                        {"mc", fit_json(sr.mc)}});
    }
    json s;
    s["model"] = base.name();
    s["beta"] = base.beta();
    s["n_min"] = config.sweep_min;
    s["n_max"] = config.sweep_max;
    s["fits"] = fits;
    s["tsme"] = tsme;
    write_summary(config, s);
    return kExitOk;
}

int run_bound_check(const RunConfig& config, const Logger& log)
{
    const ModelConfig& mc = *config.model;
    CsvWriter csv(config, {"instance", "mode", "O_k", "var_haar", "bound_haar", "chain_haar",
                           "var_hs", "bound_hs", "chain_hs", "ok"});
    Index violations = 0;
    json instances = json::array();
    for (int inst = 0; inst < config.instances; ++inst) {
        std::optional<DaviesModel> davies;
        LindbladModel model;
        if (mc.builder == ModelBuilder::DaviesRandom) {
            davies = random_davies(mc.davies_qubits, mc.davies_beta,
                                   mc.davies_seed + static_cast<std::uint64_t>(inst),
                                   mc.davies_gamma);
            model = davies->model;
        } else {
            model = build_model(mc);
        }
        const Index d = model.dim;
        const SpectralDecomposition dec = decompose(config, mc, model, d * d, log);
        const EnsembleSpec haar = EnsembleSpec::two_design_pure(d);
        const EnsembleSpec hs = EnsembleSpec::hilbert_schmidt(d);
        const double dd = static_cast<double>(d);
        Index chain_failures = 0;
        for (int k : config.modes.resolve(dec.size())) {
            if (k < 2) {
                continue;
            }
            const double o2 = std::pow(dec.condition_number(k), 2);
            const VarianceBounds b = variance_upper_bounds(dec, k);
            const double vh = closed_form_moments(dec, haar, k).variance;
            const double vs = closed_form_moments(dec, hs, k).variance;
            const double chain_h = o2 / dd;
            const double chain_s = o2 / (dd * dd);
            const bool ok = vh < b.haar_bound && b.haar_bound <= chain_h * (1.0 + 1e-12) &&
                            vs < b.hs_bound && b.hs_bound <= chain_s * (1.0 + 1e-12);
            if (!ok) {
                ++chain_failures;
            }
            csv.row({std::to_string(inst), std::to_string(k), num(dec.condition_number(k)),
                     num(vh), num(b.haar_bound), num(chain_h), num(vs), num(b.hs_bound),
                     num(chain_s), ok ? "1" : "0"});
        }
        json entry{{"instance", inst}, {"variance_chain_failures", chain_failures}};
        violations += chain_failures;
        if (davies) {
            const QdbReport r = qdb_bound_check(*davies, dec, false);
            violations += r.violations;
            entry["max_condition_number"] = r.max_condition_number;
            entry["bound"] = r.bound;
            entry["bound_violations"] = r.violations;
            entry["kms_residual"] = r.kms_residual;
            entry["gns_residual"] = r.gns_residual;
            entry["left_right_residual"] = r.left_right_residual;
            entry["left_right_residual_rho"] = r.left_right_residual_rho;
            entry["nondegenerate_modes"] = r.nondegenerate_modes;
            entry["stationary_distance"] = r.stationary_distance;
        }
        instances.push_back(entry);
    }
    json s;
    s["model"] = mc.name();
    s["instances"] = instances;
    s["violations"] = violations;
    write_summary(config, s);
    if (violations > 0) {
        log(std::to_string(violations) + " bound violations");
        return kExitViolation;
    }
    return kExitOk;
}

int run_oracle_check(const RunConfig& config, const Logger& log)
{
    const ChainParams& p = config.model->chain;
    const LindbladModel model = build_model(*config.model);
    const Index d = model.dim;
    const SpectralDecomposition num_dec = decompose(config, *config.model, model, d * d, log);
    const ChainOracle oracle = analytic_chain_oracle(p, config.normalization);
    const Index n = oracle.decomp.size();

    CsvWriter csv(config, {"mode", "labels", "lambda_re", "lambda_im", "d_lambda", "d_norm_L",
                           "d_trace_L", "match"});
    std::vector<bool> used(static_cast<size_t>(n), false);
    Index mismatches = 0;
    double worst_lambda = 0.0;
    double worst_norm = 0.0;
    double worst_trace = 0.0;
    for (int k = 1; k <= n; ++k) {
        const Complex lambda = oracle.decomp.eigenvalue(k);
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= num_dec.size(); ++j) {
            if (used[static_cast<size_t>(j - 1)] ||
                std::abs(num_dec.eigenvalue(j) - lambda) > 1e-6) {
                continue;
            }
            const double dist = (num_dec.right(j) - oracle.decomp.right(k)).norm();
            if (dist < best_dist) {
                best = j;
                best_dist = dist;
            }
        }
        std::string labels;
        for (int l : oracle.labels[static_cast<size_t>(k - 1)]) {
            labels += std::to_string(l);
        }
        double dl = std::numeric_limits<double>::infinity();
        double dn = dl;
        double dt = dl;
        if (best > 0) {
            used[static_cast<size_t>(best - 1)] = true;
            dl = std::abs(num_dec.eigenvalue(best) - lambda);
            dn = std::abs(num_dec.left(best).norm() - oracle.decomp.left(k).norm());
            dt = std::abs(num_dec.left(best).trace() - oracle.decomp.left(k).trace());
        }
        const bool ok = dl <= config.oracle_tol && dn <= config.oracle_tol && dt <= config.oracle_tol;
        if (!ok) {
            ++mismatches;
        }
        worst_lambda = std::max(worst_lambda, dl);
        worst_norm = std::max(worst_norm, dn);
        worst_trace = std::max(worst_trace, dt);
        csv.row({std::to_string(k), labels, num(lambda.real()), num(lambda.imag()), num(dl), num(dn),
                 num(dt), ok ? "1" : "0"});
    }
    json s;
    s["N"] = p.n;
    s["modes"] = n;
    s["mismatches"] = mismatches;
    s["tolerance"] = config.oracle_tol;
    s["max_lambda_diff"] = worst_lambda;
    s["max_norm_diff"] = worst_norm;
    s["max_trace_diff"] = worst_trace;
    write_summary(config, s);
    if (mismatches > 0) {
        log(std::to_string(mismatches) + " oracle mismatches");
        return kExitViolation;
    }
    return kExitOk;
}

int run_mixing_time(const RunConfig& config, const Logger& log)
{
    const ModelConfig& mc = *config.model;
    const LindbladModel model = build_model(mc);
    const Index d = model.dim;
    if (config.iterative) {
        throw ConfigError("iterative: mixing-time needs the complete dense decomposition");
    }
    const SpectralDecomposition dec = decompose(config, mc, model, d * d, log);
    const EnsembleSpec spec = make_ensemble(config.ensembles.front(), d);
    const std::vector<int> modes = config.modes.resolve(dec.size());
    const double gap = std::abs(dec.eigenvalue(2).real());
    const double horizon = config.horizon > 0.0 ? config.horizon : 50.0 / gap;

    double delta = config.delta.value_or(0.0);
    if (config.delta_sigma) {
        double sigma = 0.0;
        for (int k : modes) {
            sigma = std::max(sigma, std::sqrt(closed_form_moments(dec, spec, k).variance));
        }
        delta = *config.delta_sigma * sigma;
    }

    CsvWriter csv(config, {"quantity", "value"});
    json s;
    auto report = [&](const std::string& name, double value) {
        csv.row({name, num(value)});
        s[name] = value;
    };
    CMatrix ground = CMatrix::Zero(d, d);
    ground(0, 0) = 1.0;
    CMatrix top = CMatrix::Zero(d, d);
    top(d - 1, d - 1) = 1.0;
    const CMatrix mixed = CMatrix::Identity(d, d) / static_cast<double>(d);
    report("mixing_time_maximally_mixed", mixing_time_state(dec, mixed, config.eps, horizon, config.grid));
    report("mixing_time_ground", mixing_time_state(dec, ground, config.eps, horizon, config.grid));
    report("mixing_time_top", mixing_time_state(dec, top, config.eps, horizon, config.grid));

    TypicalMixingOptions o;
    o.modes = modes;
    o.horizon = horizon;
    o.grid = config.grid;
    o.threads = config.threads;
    log("typical mixing time over " + std::to_string(config.n_samples) + " samples");
    const TypicalMixing t =
        typical_mixing_time(dec, spec, delta, config.eps, config.n_samples, *config.seed, o);
    report("delta", delta);
    report("typical_mixing_time", t.time);
    report("typical_min", t.typical_min);
    report("acceptance_fraction", t.acceptance_fraction);
    report("sample_max_mixing_time", t.worst_case);
    const RelaxationTime tau = typical_relaxation_time(dec, config.eps);
    report("typical_relaxation_time", tau.time);
    report("typical_relaxation_mode", tau.mode);
    s["ensemble"] = config.ensembles.front().name();
    s["modes"] = modes;
    write_summary(config, s);
    return kExitOk;
}

} // namespace

int run(const RunConfig& config, const RunOptions& options)
{
    const Logger log(options);
    switch (config.command) {
    case Command::Spectrum:
        return run_spectrum(config, log);
    case Command::Typicality:
        return run_typicality(config, log);
    case Command::Sweep:
        return run_sweep(config, log);
    case Command::BoundCheck:
        return run_bound_check(config, log);
    case Command::OracleCheck:
        return run_oracle_check(config, log);
    case Command::MixingTime:
        return run_mixing_time(config, log);
    }
    return kExitConfig;
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const BoundViolated*>(&e)) {
        return kExitViolation;
    }
    if (dynamic_cast<const NumericalError*>(&e)) {
        return kExitNumerical;
    }
    if (dynamic_cast<const InvalidArgument*>(&e)) {
        return kExitConfig;
    }
    return kExitNumerical;
}

} // namespace relaxtyp
