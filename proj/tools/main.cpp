#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "envlab/envariance.hpp"
#include "envlab/finegrain.hpp"
#include "envlab/frequency.hpp"
#include "envlab/io.hpp"
#include "envlab/selftest.hpp"

namespace {

using envlab::Complex;
using envlab::Index;
using envlab::ValidationError;
using ordered_json = nlohmann::ordered_json;

int g_exit_code = 0;

struct StateInput {
    std::string path;
    std::string amps;
    std::vector<Index> dims;
    std::vector<std::string> labels;
};

void add_state_options(CLI::App* cmd, StateInput& input) {
    cmd->add_option("--state", input.path, "state JSON file");
    cmd->add_option("--amps", input.amps,
                    "inline amplitudes: comma-separated re+imj tokens (e.g. "
                    "\"0.577,0.577,-0.577\" or \"0.5+0.5j,0,0.707\")");
    cmd->add_option("--dims", input.dims, "subsystem dims for --amps, e.g. 2,2")
        ->delimiter(',');
    cmd->add_option("--labels", input.labels,
                    "subsystem labels for --amps (default q0,q1,...)")
        ->delimiter(',');
}

envlab::PureState resolve_state(const StateInput& input) {
    if (!input.path.empty() && !input.amps.empty())
        throw ValidationError("give either --state or --amps, not both");
    if (!input.path.empty()) return envlab::load_state(input.path);
    if (!input.amps.empty()) {
        if (input.dims.empty())
            throw ValidationError("--amps needs --dims (subsystem dimensions)");
        return envlab::parse_inline_state(input.amps, input.dims, input.labels);
    }
    throw ValidationError("a state is required: --state FILE or --amps LIST --dims D1,D2,...");
}

std::vector<std::string> split(const std::string& text, char delim) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream stream(text);
    while (std::getline(stream, token, delim)) parts.push_back(token);
    return parts;
}

envlab::Cut resolve_cut(const std::string& spec, const envlab::PureState& state) {
    if (spec.empty()) {
        if (state.num_subsystems() < 2)
            throw ValidationError("state has a single subsystem; no bipartite cut exists");
        envlab::Cut cut;
        cut.system.push_back(state.labels()[0]);
        for (std::size_t k = 1; k < state.labels().size(); ++k)
            cut.env.push_back(state.labels()[k]);
        return cut;
    }
    const auto sides = split(spec, '|');
    if (sides.size() != 2)
        throw ValidationError("--cut must look like \"S|E\" or \"S,C|E\"");
    envlab::Cut cut{split(sides[0], ','), split(sides[1], ',')};
    envlab::validate_cut(state, cut);
    return cut;
}

envlab::LocalUnitary load_unitary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open unitary file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& err) {
        throw ValidationError(path + ": invalid JSON: " + err.what());
    }
    std::vector<std::string> targets;
    if (doc.contains("target") && doc["target"].is_string()) {
        targets.push_back(doc["target"].get<std::string>());
    } else if (doc.contains("targets") && doc["targets"].is_array()) {
        for (const auto& item : doc["targets"]) targets.push_back(item.get<std::string>());
    } else {
        throw ValidationError(path + ": field \"target\" (string) or \"targets\" (array) required");
    }
    if (!doc.contains("matrix") || !doc["matrix"].is_array())
        throw ValidationError(path + ": field \"matrix\" must be an array of rows of [re, im]");
    const auto& rows = doc["matrix"];
    const Index dim = static_cast<Index>(rows.size());
    envlab::Matrix u(dim, dim);
    for (Index r = 0; r < dim; ++r) {
        if (!rows[r].is_array() || static_cast<Index>(rows[r].size()) != dim)
            throw ValidationError(path + ": field \"matrix\" must be square");
        for (Index c = 0; c < dim; ++c) {
            const auto& cell = rows[r][c];
            if (!cell.is_array() || cell.size() != 2)
                throw ValidationError(path + ": field \"matrix\" entries must be [re, im]");
            u(r, c) = Complex{cell[0].get<double>(), cell[1].get<double>()};
        }
    }
    return envlab::LocalUnitary(std::move(targets), std::move(u));
}

ordered_json matrix_to_json(const envlab::Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Index c = 0; c < m.cols(); ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json columns_to_json(const envlab::Matrix& m) {
    ordered_json cols = ordered_json::array();
    for (Index c = 0; c < m.cols(); ++c) {
        ordered_json col = ordered_json::array();
        for (Index r = 0; r < m.rows(); ++r)
            col.push_back({m(r, c).real(), m(r, c).imag()});
        cols.push_back(std::move(col));
    }
    return cols;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write output file '" + out_path + "'");
    out << text;
}

envlab::SwapSpec swap_spec_from(const std::vector<Index>& indices, double phase) {
    if (indices.size() != 2)
        throw ValidationError("--swap needs exactly two indices, e.g. --swap 0,1");
    return envlab::SwapSpec(indices[0], indices[1], phase);
}

void setup_schmidt(CLI::App& app) {
    auto* cmd = app.add_subcommand("schmidt", "Schmidt decomposition across a bipartite cut");
    auto input = std::make_shared<StateInput>();
    auto cut_spec = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    add_state_options(cmd, *input);
    cmd->add_option("--cut", *cut_spec, "bipartition, e.g. \"S|E\" or \"S,C|E\" (default: first|rest)");
    cmd->add_option("--out", *out_path, "write the report to a file instead of stdout");
    cmd->callback([input, cut_spec, out_path] {
        const envlab::PureState state = resolve_state(*input);
        const envlab::Cut cut = resolve_cut(*cut_spec, state);
        const envlab::SchmidtDecomposition sd = envlab::schmidt(state, cut);
        ordered_json report;
        report["moduli"] = std::vector<double>(sd.moduli().begin(), sd.moduli().end());
        report["phases"] = std::vector<double>(sd.phases().begin(), sd.phases().end());
        report["rank"] = sd.rank();
        report["system_labels"] = sd.system_labels();
        report["env_labels"] = sd.env_labels();
        report["system_basis"] = columns_to_json(sd.system_basis());
        report["env_basis"] = columns_to_json(sd.env_basis());
        emit(report.dump() + "\n", *out_path);
    });
}

void setup_envariance(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "envariance", "check a transformation pair, or find the best counter for u_S");
    auto input = std::make_shared<StateInput>();
    auto cut_spec = std::make_shared<std::string>();
    auto swap_idx = std::make_shared<std::vector<Index>>();
    auto phase = std::make_shared<double>(0.0);
    auto phases = std::make_shared<std::vector<double>>();
    auto unitary_path = std::make_shared<std::string>();
    auto unitary_env_path = std::make_shared<std::string>();
    auto tolerance = std::make_shared<double>(envlab::tol::recon);
    auto out_path = std::make_shared<std::string>();
    add_state_options(cmd, *input);
    cmd->add_option("--cut", *cut_spec, "bipartition (default: first|rest)");
    cmd->add_option("--swap", *swap_idx, "Schmidt branch swap i,j")->delimiter(',');
    cmd->add_option("--phase", *phase, "swap phase (default 0)");
    cmd->add_option("--phases", *phases, "branch phase rotation, one angle per branch")
        ->delimiter(',');
    cmd->add_option("--unitary", *unitary_path, "system unitary JSON file");
    cmd->add_option("--unitary-env", *unitary_env_path, "environment unitary JSON file");
    cmd->add_option("--tol", *tolerance, "envariance tolerance");
    cmd->add_option("--out", *out_path, "write the report to a file instead of stdout");
    cmd->callback([input, cut_spec, swap_idx, phase, phases, unitary_path, unitary_env_path,
                   tolerance, out_path] {
        const envlab::PureState state = resolve_state(*input);
        ordered_json report;
        const int spec_count = (!swap_idx->empty() ? 1 : 0) + (!phases->empty() ? 1 : 0) +
                               (!unitary_path->empty() ? 1 : 0);
        if (spec_count != 1)
            throw ValidationError(
                "give exactly one system transformation: --swap, --phases, or --unitary");

        if (!unitary_path->empty() && unitary_env_path->empty()) {
            // No counter supplied: search for the optimal one.
            const envlab::LocalUnitary u_s = load_unitary(*unitary_path);
            const envlab::CounterResult result = envlab::optimal_counter(state, u_s);
            report["envariant"] = result.residual <= *tolerance;
            report["residual"] = result.residual;
            report["certificate"] = result.certificate;
            report["counter_targets"] = result.counter.targets();
            report["counter_matrix"] = matrix_to_json(result.counter.matrix());
            emit(report.dump() + "\n", *out_path);
            return;
        }

        envlab::LocalUnitary u_s = [&] {
            if (!unitary_path->empty()) return load_unitary(*unitary_path);
            const envlab::Cut cut = resolve_cut(*cut_spec, state);
            const envlab::SchmidtDecomposition sd = envlab::schmidt(state, cut);
            if (!swap_idx->empty())
                return envlab::swap_pair(sd, swap_spec_from(*swap_idx, *phase)).first;
            return envlab::phase_rotation_pair(sd, *phases).first;
        }();
        envlab::LocalUnitary u_e = [&] {
            if (!unitary_env_path->empty()) return load_unitary(*unitary_env_path);
            const envlab::Cut cut = resolve_cut(*cut_spec, state);
            const envlab::SchmidtDecomposition sd = envlab::schmidt(state, cut);
            if (!swap_idx->empty())
                return envlab::swap_pair(sd, swap_spec_from(*swap_idx, *phase)).second;
            return envlab::phase_rotation_pair(sd, *phases).second;
        }();

        const double residual = envlab::envariance_residual(state, u_s, u_e);
        report["envariant"] = residual <= *tolerance;
        report["residual"] = residual;
        report["fidelity"] = envlab::envariance_fidelity(state, u_s, u_e);
        report["tol"] = *tolerance;
        emit(report.dump() + "\n", *out_path);
    });
}

void setup_counter(CLI::App& app) {
    auto* cmd = app.add_subcommand("counter",
                                   "optimal environment-side counter for a system unitary");
    auto input = std::make_shared<StateInput>();
    auto cut_spec = std::make_shared<std::string>();
    auto swap_idx = std::make_shared<std::vector<Index>>();
    auto phase = std::make_shared<double>(0.0);
    auto unitary_path = std::make_shared<std::string>();
    auto tolerance = std::make_shared<double>(envlab::tol::recon);
    auto out_path = std::make_shared<std::string>();
    add_state_options(cmd, *input);
    cmd->add_option("--cut", *cut_spec, "bipartition (default: first|rest)");
    cmd->add_option("--swap", *swap_idx, "build u_S as a Schmidt branch swap i,j")->delimiter(',');
    cmd->add_option("--phase", *phase, "swap phase (default 0)");
    cmd->add_option("--unitary", *unitary_path, "system unitary JSON file");
    cmd->add_option("--tol", *tolerance, "residual threshold for the envariant verdict");
    cmd->add_option("--out", *out_path, "write the report to a file instead of stdout");
    cmd->callback([input, cut_spec, swap_idx, phase, unitary_path, tolerance, out_path] {
        const envlab::PureState state = resolve_state(*input);
        if (swap_idx->empty() == unitary_path->empty())
            throw ValidationError("give exactly one of --swap or --unitary");
        const envlab::LocalUnitary u_s = [&] {
            if (!unitary_path->empty()) return load_unitary(*unitary_path);
            const envlab::Cut cut = resolve_cut(*cut_spec, state);
            const envlab::SchmidtDecomposition sd = envlab::schmidt(state, cut);
            return envlab::swap_pair(sd, swap_spec_from(*swap_idx, *phase)).first;
        }();
        const envlab::CounterResult result = envlab::optimal_counter(state, u_s);
        ordered_json report;
        report["envariant"] = result.residual <= *tolerance;
        report["residual"] = result.residual;
        report["certificate"] = result.certificate;
        report["counter_targets"] = result.counter.targets();
        report["counter_matrix"] = matrix_to_json(result.counter.matrix());
        emit(report.dump() + "\n", *out_path);
    });
}

void setup_born(CLI::App& app) {
    auto* cmd = app.add_subcommand("born", "probabilities by fine-grained branch counting");
    auto alpha2 = std::make_shared<double>(0.0);
    auto M = std::make_shared<std::int64_t>(0);
    auto phi0 = std::make_shared<double>(0.0);
    auto phi1 = std::make_shared<double>(0.0);
    auto tolerance = std::make_shared<double>(1e-3);
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--alpha2", *alpha2, "|alpha|^2, the weight of outcome 0")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--M", *M, "number of fine-grained slots (default: smallest M <= 10^4 meeting --tol)");
    cmd->add_option("--phi0", *phi0, "phase of alpha (default 0)");
    cmd->add_option("--phi1", *phi1, "phase of beta (default 0)");
    cmd->add_option("--tol", *tolerance, "target |m/M - alpha2| when --M is omitted");
    cmd->add_option("--out", *out_path, "write the report to a file instead of stdout");
    cmd->callback([alpha2, M, phi0, phi1, tolerance, out_path] {
        std::int64_t denom = *M;
        if (denom == 0) denom = envlab::default_denominator(*alpha2, *tolerance);
        const Complex alpha = std::polar(std::sqrt(*alpha2), *phi0);
        const Complex beta = std::polar(std::sqrt(1.0 - *alpha2), *phi1);
        const envlab::BornResult result = envlab::derive_born(alpha, beta, denom);
        ordered_json report;
        report["p"] = result.probabilities;
        report["counts"] = result.branch_counts;
        report["M"] = result.M;
        report["error_bound"] = result.error_bound;
        report["method"] = envlab::to_string(result.method);
        emit(report.dump() + "\n", *out_path);
    });
}

void setup_ensemble(CLI::App& app) {
    auto* cmd = app.add_subcommand("ensemble",
                                   "exact branch counts and probabilities over N triplets");
    auto N = std::make_shared<std::int64_t>(0);
    auto m = std::make_shared<std::int64_t>(0);
    auto M = std::make_shared<std::int64_t>(0);
    auto format = std::make_shared<std::string>("csv");
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--N", *N, "ensemble size")->required();
    cmd->add_option("--m", *m, "counterweight slots recording outcome 0")->required();
    cmd->add_option("--M", *M, "total counterweight slots")->required();
    cmd->add_option("--format", *format, "csv (default) or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", *out_path, "write the report to a file instead of stdout");
    cmd->callback([N, m, M, format, out_path] {
        const envlab::EnsembleDistribution dist = envlab::ensemble_counts(*N, *m, *M);
        const double p0 = static_cast<double>(*m) / static_cast<double>(*M);
        const envlab::BigInt total =
            pow(envlab::BigInt(*M), static_cast<unsigned>(*N));
        double prob_sum = 0.0;
        for (const double p : dist.probabilities) prob_sum += p;

        if (*format == "csv") {
            std::ostringstream csv;
            csv << "n,count,probability,gaussian\n";
            for (std::int64_t n = 0; n <= *N; ++n) {
                csv << n << "," << dist.counts[static_cast<std::size_t>(n)].str() << ","
                    << envlab::format_double(dist.probabilities[static_cast<std::size_t>(n)])
                    << ","
                    << envlab::format_double(
                           envlab::gaussian_approx(*N, p0, static_cast<double>(n)))
                    << "\n";
            }
            csv << "total," << total.str() << "," << envlab::format_double(prob_sum) << ",\n";
            emit(csv.str(), *out_path);
            return;
        }
        ordered_json report;
        report["N"] = dist.N;
        report["m"] = dist.m;
        report["M"] = dist.M;
        auto& rows = report["rows"] = ordered_json::array();
        for (std::int64_t n = 0; n <= *N; ++n) {
            ordered_json row;
            row["n"] = n;
            row["count"] = dist.counts[static_cast<std::size_t>(n)].str();
            row["probability"] = dist.probabilities[static_cast<std::size_t>(n)];
            row["gaussian"] = envlab::gaussian_approx(*N, p0, static_cast<double>(n));
            rows.push_back(std::move(row));
        }
        report["total"] = total.str();
        report["probability_sum"] = prob_sum;
        emit(report.dump() + "\n", *out_path);
    });
}

void setup_distinguish(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "distinguish", "detectability of a basis swap on an unentangled state");
    auto input = std::make_shared<StateInput>();
    auto swap_idx = std::make_shared<std::vector<Index>>();
    auto phase = std::make_shared<double>(0.0);
    auto out_path = std::make_shared<std::string>();
    add_state_options(cmd, *input);
    cmd->add_option("--swap", *swap_idx, "basis indices i,j to swap")->delimiter(',')->required();
    cmd->add_option("--phase", *phase, "swap phase (default 0)");
    cmd->add_option("--out", *out_path, "write the report to a file instead of stdout");
    cmd->callback([input, swap_idx, phase, out_path] {
        const envlab::PureState chi = resolve_state(*input);
        const envlab::Detectability result =
            envlab::swap_detectability(chi, swap_spec_from(*swap_idx, *phase));
        ordered_json report;
        report["overlap"] = {result.overlap.real(), result.overlap.imag()};
        report["overlap_abs"] = std::abs(result.overlap);
        report["distinguish_prob"] = result.distinguish_prob;
        report["detectable"] = result.distinguish_prob > 0.5;
        emit(report.dump() + "\n", *out_path);
    });
}

void setup_selftest(CLI::App& app) {
    auto* cmd = app.add_subcommand("selftest", "seeded property sweeps over the core guarantees");
    auto seed = std::make_shared<std::uint64_t>(42);
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--seed", *seed, "sweep seed (default 42; the seed fixes every draw)");
    cmd->add_option("--out", *out_path, "write the report to a file instead of stdout");
    cmd->callback([seed, out_path] {
        std::ostringstream report;
        const int failures = envlab::run_selftest(*seed, report);
        emit(report.str(), *out_path);
        if (failures > 0) g_exit_code = 3;
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "envlab: numerical experiments with environment-assisted invariance.\n"
        "State files are JSON objects {\"labels\": [...], \"dims\": [...],\n"
        "\"amplitudes\": [[re, im], ...]} with amplitudes row-major, first label\n"
        "varying slowest. ENVLAB_DIM_CAP overrides the amplitude-count cap."};
    app.require_subcommand(1);

    setup_schmidt(app);
    setup_envariance(app);
    setup_counter(app);
    setup_born(app);
    setup_ensemble(app);
    setup_distinguish(app);
    setup_selftest(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const envlab::ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return g_exit_code;
}
