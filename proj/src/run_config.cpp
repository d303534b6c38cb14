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

#include "relaxtyp/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace relaxtyp {

using nlohmann::json;

std::string command_name(Command command)
{
    switch (command) {
    case Command::Spectrum:
        return "spectrum";
    case Command::Typicality:
        return "typicality";
    case Command::Sweep:
        return "sweep";
    case Command::BoundCheck:
        return "bound-check";
    case Command::OracleCheck:
        return "oracle-check";
    case Command::MixingTime:
        return "mixing-time";
    }
    return "unknown";
}

int ModelConfig::qubits() const
{
    switch (builder) {
    case ModelBuilder::Chain:
        return chain.n;
    case ModelBuilder::TFIM:
        return tfim.n;
    case ModelBuilder::DaviesRandom:
        return davies_qubits;
    }
    return 0;
}

ModelConfig ModelConfig::with_qubits(int n) const
{
    ModelConfig out = *this;
    out.chain.n = n;
    out.tfim.n = n;
    out.davies_qubits = n;
    return out;
}

double ModelConfig::beta() const
{
    switch (builder) {
    case ModelBuilder::Chain:
        return 0.0;
    case ModelBuilder::TFIM:
        return tfim.beta;
    case ModelBuilder::DaviesRandom:
        return davies_beta;
    }
    return 0.0;
}

std::string ModelConfig::name() const
{
    switch (builder) {
    case ModelBuilder::Chain:
        return "chain";
    case ModelBuilder::TFIM:
        return "tfim";
    case ModelBuilder::DaviesRandom:
        return "davies_random";
    }
    return "unknown";
}

std::string EnsembleConfig::name() const
{
    switch (kind) {
    case EnsembleKind::TwoDesign:
        switch (reference) {
        case ReferenceKind::Pure:
            return "two_design_pure";
        case ReferenceKind::MaximallyMixed:
            return "two_design_maximally_mixed";
        case ReferenceKind::Diagonal:
            return "two_design_diagonal";
        }
        break;
    case EnsembleKind::HilbertSchmidt:
        return "hilbert_schmidt";
    case EnsembleKind::Induced:
        return "induced";
    case EnsembleKind::ConstrainedPure:
        return "constrained_pure";
    }
    return "unknown";
}

std::vector<int> ModeSelection::resolve(Index available) const
{
    std::vector<int> out;
    switch (kind) {
    case Kind::Slowest:
        out = {2};
        break;
    case Kind::All:
        for (int k = 1; k <= available; ++k) {
            out.push_back(k);
        }
        break;
    case Kind::List:
        out = modes;
        break;
    }
    for (int k : out) {
        if (k < 1 || k > available) {
            throw ConfigError("modes: mode " + std::to_string(k) + " outside 1.." +
                              std::to_string(available));
        }
    }
    return out;
}

int ModeSelection::max_mode(Index d) const
{
    switch (kind) {
    case Kind::Slowest:
        return 2;
    case Kind::All:
        return static_cast<int>(d * d);
    case Kind::List: {
        int m = 1;
        for (int k : modes) {
            m = std::max(m, k);
        }
        return m;
    }
    }
    return 2;
}

std::string RunConfig::summary_path() const
{
    return summary.empty() ? output + ".json" : summary;
}

std::string RunConfig::hash() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h = (h ^ c) * 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// Reads keys from one JSON object and rejects any key that was never read.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& raw(const std::string& key)
    {
        seen_.insert(key);
        return obj_.at(key);
    }

    template <class T>
    T get(const std::string& key, T fallback)
    {
        if (!obj_.contains(key)) {
            return fallback;
        }
        return read<T>(key);
    }

    template <class T>
    T require(const std::string& key)
    {
        if (!obj_.contains(key)) {
            throw ConfigError(where(key) + ": required key is missing");
        }
        return read<T>(key);
    }

    template <class T>
    std::optional<T> optional(const std::string& key)
    {
        if (!obj_.contains(key)) {
            return std::nullopt;
        }
        return read<T>(key);
    }

    void finish() const
    {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ConfigError(where(it.key()) + ": unknown key");
            }
        }
    }

    std::string where(const std::string& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    template <class T>
    T read(const std::string& key)
    {
        seen_.insert(key);
        const json& v = obj_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) {
                    throw ConfigError(where(key) + ": expected a boolean");
                }
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) {
                    throw ConfigError(where(key) + ": expected an integer");
                }
                if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() &&
                    v.get<long long>() < 0) {
                    throw ConfigError(where(key) + ": expected a nonnegative integer");
                }
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) {
                    throw ConfigError(where(key) + ": expected a number");
                }
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) {
                    throw ConfigError(where(key) + ": expected a string");
                }
            }
            return v.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

Command parse_command(const std::string& s)
{
    for (Command c : {Command::Spectrum, Command::Typicality, Command::Sweep, Command::BoundCheck,
                      Command::OracleCheck, Command::MixingTime}) {
        if (command_name(c) == s) {
            return c;
        }
    }
    throw ConfigError("command: unknown command '" + s + "'");
}

// Sweeps set the size per point, so N is optional there.
ModelConfig parse_model(const json& obj, bool sized_by_sweep)
{
    Section s(obj, "model");
    ModelConfig m;
    auto size = [&] { return sized_by_sweep ? s.get<int>("N", 2) : s.require<int>("N"); };
    const auto builder = s.require<std::string>("builder");
    if (builder == "chain") {
        m.builder = ModelBuilder::Chain;
        m.chain.n = size();
        m.chain.energy = s.get<double>("E", 1.0);
        m.chain.gamma0 = s.require<double>("gamma0");
        m.chain.gamma1 = s.require<double>("gamma1");
        m.chain.gamma_dephasing = s.get<double>("gamma_dephasing", 0.0);
    } else if (builder == "tfim") {
        m.builder = ModelBuilder::TFIM;
        m.tfim.n = size();
        m.tfim.j = s.get<double>("J", 1.0);
        m.tfim.g = s.get<double>("g", 1.0);
        m.tfim.beta = s.require<double>("beta");
        m.tfim.gamma = s.get<double>("gamma", 0.5);
        m.tfim.energy = s.get<double>("E", 1.0);
        m.tfim.gamma0 = s.optional<double>("gamma0");
        m.tfim.gamma1 = s.optional<double>("gamma1");
    } else if (builder == "davies_random") {
        m.builder = ModelBuilder::DaviesRandom;
        m.davies_qubits = size();
        m.davies_beta = s.require<double>("beta");
        m.davies_gamma = s.get<double>("gamma", 1.0);
        m.davies_seed = s.get<std::uint64_t>("instance_seed", 1);
    } else {
        throw ConfigError("model.builder: unknown builder '" + builder + "'");
    }
    s.finish();
    try {
        if (m.builder == ModelBuilder::Chain) {
            m.chain.validate();
        } else if (m.builder == ModelBuilder::TFIM) {
            m.tfim.validate();
        } else if (m.davies_qubits < 1 || m.davies_qubits > 6 || m.davies_beta < 0.0) {
            throw InvalidArgument("davies_random needs 1 <= N <= 6 and beta >= 0");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    return m;
}

EnsembleConfig parse_ensemble(const json& obj, const std::string& path)
{
    Section s(obj, path);
    EnsembleConfig e;
    const auto kind = s.require<std::string>("kind");
    if (kind == "two_design") {
        e.kind = EnsembleKind::TwoDesign;
        if (s.has("reference") && s.raw("reference").is_array()) {
            e.reference = ReferenceKind::Diagonal;
            for (const auto& v : s.raw("reference")) {
                if (!v.is_number() || v.get<double>() < 0.0) {
                    throw ConfigError(s.where("reference") + ": populations must be nonnegative");
                }
                e.populations.push_back(v.get<double>());
            }
        } else {
            const auto ref = s.get<std::string>("reference", "pure");
            if (ref == "pure") {
                e.reference = ReferenceKind::Pure;
            } else if (ref == "maximally_mixed") {
                e.reference = ReferenceKind::MaximallyMixed;
            } else {
                throw ConfigError(s.where("reference") + ": expected 'pure', 'maximally_mixed' " +
                                  "or a list of populations");
            }
        }
    } else if (kind == "hilbert_schmidt") {
        e.kind = EnsembleKind::HilbertSchmidt;
    } else if (kind == "induced") {
        e.kind = EnsembleKind::Induced;
        e.d_b = s.require<Index>("d_b");
        if (e.d_b < 1) {
            throw ConfigError(s.where("d_b") + ": must be positive");
        }
    } else if (kind == "constrained_pure") {
        e.kind = EnsembleKind::ConstrainedPure;
        e.dim_e = s.require<Index>("dim_e");
        if (e.dim_e < 1) {
            throw ConfigError(s.where("dim_e") + ": must be positive");
        }
        const auto projector = s.get<std::string>("projector", "identity");
        if (projector == "identity") {
            e.projector = ProjectorKind::Identity;
        } else if (projector == "random") {
            e.projector = ProjectorKind::Random;
            e.rank = s.require<Index>("rank");
            e.projector_seed = s.get<std::uint64_t>("projector_seed", 1);
            if (e.rank < 1) {
                throw ConfigError(s.where("rank") + ": must be positive");
            }
        } else {
            throw ConfigError(s.where("projector") + ": expected 'identity' or 'random'");
        }
    } else {
        throw ConfigError(s.where("kind") + ": unknown ensemble '" + kind + "'");
    }
    s.finish();
    return e;
}

ModeSelection parse_modes(const json& v)
{
    ModeSelection m;
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "slowest") {
            m.kind = ModeSelection::Kind::Slowest;
        } else if (s == "all") {
            m.kind = ModeSelection::Kind::All;
        } else {
            throw ConfigError("modes: expected 'slowest', 'all' or a list of mode indices");
        }
        return m;
    }
    if (!v.is_array() || v.empty()) {
        throw ConfigError("modes: expected 'slowest', 'all' or a list of mode indices");
    }
    m.kind = ModeSelection::Kind::List;
    for (const auto& k : v) {
        if (!k.is_number_integer() || k.get<int>() < 1) {
            throw ConfigError("modes: mode indices are positive integers");
        }
        m.modes.push_back(k.get<int>());
    }
    return m;
}

void validate(const RunConfig& c)
{
    if (!c.model) {
        throw ConfigError("model: required for command " + command_name(c.command));
    }
    const bool samples = c.n_samples > 0;
    switch (c.command) {
    case Command::Typicality:
    case Command::MixingTime:
        if (c.ensembles.empty()) {
            throw ConfigError("ensemble: required for command " + command_name(c.command));
        }
        if (c.n_samples < 100) {
            throw ConfigError("n_samples: at least 100 required for " + command_name(c.command));
        }
        break;
    case Command::Sweep:
        if (c.ensembles.empty()) {
            throw ConfigError("ensembles: required for command sweep");
        }
        if (c.sweep_min < 1 || c.sweep_max < c.sweep_min) {
            throw ConfigError("sweep: need 1 <= n_min <= n_max");
        }
        if (samples && c.n_samples < 100) {
            throw ConfigError("n_samples: use 0 (analytic only) or at least 100");
        }
        break;
    case Command::OracleCheck:
        if (c.model->builder != ModelBuilder::Chain) {
            throw ConfigError("model.builder: oracle-check needs the chain builder");
        }
        if (c.model->chain.gamma_dephasing != 0.0) {
            throw ConfigError("model.gamma_dephasing: oracle-check covers the undephased chain");
        }
        break;
    case Command::BoundCheck:
    case Command::Spectrum:
        break;
    }
    const bool sampling = c.command == Command::Typicality || c.command == Command::MixingTime ||
                          (c.command == Command::Sweep && samples);
    if (sampling && !c.seed) {
        throw ConfigError("seed: required for sampling commands");
    }
    if (c.command == Command::MixingTime && !c.delta && !c.delta_sigma) {
        throw ConfigError("delta: mixing-time needs delta or delta_sigma");
    }
    if (c.delta && c.delta_sigma) {
        throw ConfigError("delta_sigma: give either delta or delta_sigma, not both");
    }
    if (!(c.eps > 0.0) || c.eps > 2.0) {
        throw ConfigError("eps: must lie in (0, 2]");
    }
    if (c.grid < 2) {
        throw ConfigError("grid: must be at least 2");
    }
    if (c.instances < 1) {
        throw ConfigError("instances: must be positive");
    }
    if (c.instances > 1 && c.model->builder != ModelBuilder::DaviesRandom) {
        throw ConfigError("instances: only davies_random models have random instances");
    }
    if (c.output.empty()) {
        throw ConfigError("output: must not be empty");
    }
}

RunConfig from_json(const json& root)
{
    Section s(root, "");
    RunConfig c;
    c.command = parse_command(s.require<std::string>("command"));
    if (s.has("model")) {
        c.model = parse_model(s.raw("model"), c.command == Command::Sweep);
    }
    if (s.has("ensemble")) {
        c.ensembles.push_back(parse_ensemble(s.raw("ensemble"), "ensemble"));
    }
    if (s.has("ensembles")) {
        const json& list = s.raw("ensembles");
        if (!list.is_array() || list.empty()) {
            throw ConfigError("ensembles: expected a non-empty list");
        }
        if (!c.ensembles.empty()) {
            throw ConfigError("ensembles: give either ensemble or ensembles, not both");
        }
        for (size_t i = 0; i < list.size(); ++i) {
            c.ensembles.push_back(parse_ensemble(list[i], "ensembles[" + std::to_string(i) + "]"));
        }
    }
    if (s.has("modes")) {
        c.modes = parse_modes(s.raw("modes"));
    }
    c.n_samples = s.get<Index>("n_samples", 0);
    if (c.n_samples < 0) {
        throw ConfigError("n_samples: must be nonnegative");
    }
    c.seed = s.optional<std::uint64_t>("seed");
    c.eps = s.get<double>("eps", 0.01);
    c.delta = s.optional<double>("delta");
    c.delta_sigma = s.optional<double>("delta_sigma");
    c.horizon = s.get<double>("horizon", 0.0);
    c.grid = s.get<int>("grid", 200);
    const auto norm = s.get<std::string>("normalization", "trace");
    if (norm == "trace") {
        c.normalization = Normalization::TraceNorm;
    } else if (norm == "hs") {
        c.normalization = Normalization::HSNorm;
    } else {
        throw ConfigError("normalization: expected 'trace' or 'hs'");
    }
    c.output = s.get<std::string>("output", "relaxtyp.csv");
    c.summary = s.get<std::string>("summary", "");
    if (s.has("sweep")) {
        Section sw(s.raw("sweep"), "sweep");
        c.sweep_min = sw.require<int>("n_min");
        c.sweep_max = sw.require<int>("n_max");
        sw.finish();
    }
    c.threads = s.get<unsigned>("threads", 1);
    c.cache_dir = s.get<std::string>("cache_dir", "");
    c.record_runtime = s.get<bool>("record_runtime", false);
    c.iterative = s.get<bool>("iterative", false);
    c.max_overlap = s.get<bool>("max_overlap", false);
    c.instances = s.get<int>("instances", 1);
    c.tol_mean = s.optional<double>("tol_mean");
    c.tol_var = s.optional<double>("tol_var");
    c.oracle_tol = s.get<double>("oracle_tol", 1e-7);
    s.finish();
    validate(c);
    c.canonical = root.dump();
    return c;
}

} // namespace

RunConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    return from_json(root);
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_overrides(RunConfig& config, std::optional<std::uint64_t> seed,
                     std::optional<std::string> output, std::optional<unsigned> threads)
{
    json root = json::parse(config.canonical);
    if (seed) {
        root["seed"] = *seed;
    }
    if (output) {
        root["output"] = *output;
    }
    if (threads) {
        root["threads"] = *threads;
    }
    config = from_json(root);
}

LindbladModel build_model(const ModelConfig& model)
{
    switch (model.builder) {
    case ModelBuilder::Chain:
        return build_chain(model.chain);
    case ModelBuilder::TFIM:
        return build_tfim(model.tfim);
    case ModelBuilder::DaviesRandom:
        return random_davies(model.davies_qubits, model.davies_beta, model.davies_seed,
                             model.davies_gamma)
            .model;
    }
    throw ConfigError("model.builder: unknown builder");
}

EnsembleSpec make_ensemble(const EnsembleConfig& config, Index d)
{
    switch (config.kind) {
    case EnsembleKind::TwoDesign:
        switch (config.reference) {
        case ReferenceKind::Pure:
            return EnsembleSpec::two_design_pure(d);
        case ReferenceKind::MaximallyMixed:
            return EnsembleSpec::two_design(CMatrix::Identity(d, d) / static_cast<double>(d));
        case ReferenceKind::Diagonal: {
            if (static_cast<Index>(config.populations.size()) != d) {
                throw ConfigError("ensemble.reference: expected " + std::to_string(d) +
                                  " populations");
            }
            CMatrix ref = CMatrix::Zero(d, d);
            double total = 0.0;
            for (Index i = 0; i < d; ++i) {
                ref(i, i) = config.populations[static_cast<size_t>(i)];
                total += config.populations[static_cast<size_t>(i)];
            }
            if (!(total > 0.0)) {
                throw ConfigError("ensemble.reference: populations sum to zero");
            }
            return EnsembleSpec::two_design(ref / total);
        }
        }
        break;
    case EnsembleKind::HilbertSchmidt:
        return EnsembleSpec::hilbert_schmidt(d);
    case EnsembleKind::Induced:
        return EnsembleSpec::induced(d, config.d_b);
    case EnsembleKind::ConstrainedPure: {
        const Index n = d * config.dim_e;
        if (config.projector == ProjectorKind::Identity) {
            return EnsembleSpec::constrained_pure(CMatrix::Identity(n, n), d, config.dim_e);
        }
        if (config.rank > n) {
            throw ConfigError("ensemble.rank: exceeds d * dim_e = " + std::to_string(n));
        }
        const CMatrix u = sample_haar_unitary(n, config.projector_seed);
        const CMatrix q = u.leftCols(config.rank);
        return EnsembleSpec::constrained_pure(hermitian_part(q * q.adjoint()), d, config.dim_e);
    }
    }
    throw ConfigError("ensemble.kind: unknown ensemble");
}

} // namespace relaxtyp
