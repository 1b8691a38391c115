#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "envlab/envariance.hpp"
#include "envlab/finegrain.hpp"
#include "envlab/frequency.hpp"
#include "envlab/io.hpp"
#include "envlab/selftest.hpp"

namespace py = pybind11;
using namespace envlab;

namespace {

py::object to_py_int(const BigInt& value) {
    static py::object int_type = py::module_::import("builtins").attr("int");
    return int_type(value.str());
}

py::list counts_to_list(const std::vector<BigInt>& counts) {
    py::list out;
    for (const BigInt& c : counts) out.append(to_py_int(c));
    return out;
}

} // namespace

PYBIND11_MODULE(_envlab, m) {
    m.doc() = "State-vector engine for envariance experiments: Schmidt symmetries, "
              "swap/counterswap pairs, fine-grained probability counting, and "
              "ensemble statistics.";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

    py::class_<PureState>(m, "PureState")
        .def(py::init<std::vector<std::string>, std::vector<Index>, Vector>(),
             py::arg("labels"), py::arg("dims"), py::arg("amplitudes"))
        .def_static("normalized", &PureState::normalized, py::arg("labels"), py::arg("dims"),
                    py::arg("amplitudes"))
        .def_static(
            "basis_state",
            [](std::vector<std::string> labels, std::vector<Index> dims,
               std::vector<Index> digits) {
                return PureState::basis_state(std::move(labels), std::move(dims), digits);
            },
            py::arg("labels"), py::arg("dims"), py::arg("digits"))
        .def_property_readonly("labels", &PureState::labels)
        .def_property_readonly("dims", &PureState::dims)
        .def_property_readonly("amplitudes",
                               [](const PureState& s) -> Vector { return s.amplitudes(); })
        .def_property_readonly("dim", &PureState::dim)
        .def("__repr__", [](const PureState& s) {
            std::ostringstream out;
            out << "PureState(labels=[";
            for (std::size_t k = 0; k < s.labels().size(); ++k)
                out << (k ? "," : "") << s.labels()[k];
            out << "], dim=" << s.dim() << ")";
            return out.str();
        });

    py::class_<LocalUnitary>(m, "LocalUnitary")
        .def(py::init<std::string, Matrix>(), py::arg("target"), py::arg("matrix"))
        .def(py::init<std::vector<std::string>, Matrix>(), py::arg("targets"), py::arg("matrix"))
        .def_property_readonly("targets", &LocalUnitary::targets)
        .def_property_readonly("matrix",
                               [](const LocalUnitary& u) -> Matrix { return u.matrix(); });

    py::class_<Cut>(m, "Cut")
        .def(py::init([](std::vector<std::string> system, std::vector<std::string> env) {
                 return Cut{std::move(system), std::move(env)};
             }),
             py::arg("system"), py::arg("env"))
        .def_readwrite("system", &Cut::system)
        .def_readwrite("env", &Cut::env);

    py::class_<SchmidtDecomposition>(m, "SchmidtDecomposition")
        .def_static(
            "from_data",
            [](RealVector moduli, RealVector phases, Matrix system_basis, Matrix env_basis) {
                return SchmidtDecomposition::from_data(std::move(moduli), std::move(phases),
                                                       std::move(system_basis),
                                                       std::move(env_basis));
            },
            py::arg("moduli"), py::arg("phases"), py::arg("system_basis"), py::arg("env_basis"))
        .def_property_readonly("moduli",
                               [](const SchmidtDecomposition& sd) -> RealVector { return sd.moduli(); })
        .def_property_readonly("phases",
                               [](const SchmidtDecomposition& sd) -> RealVector { return sd.phases(); })
        .def_property_readonly(
            "system_basis",
            [](const SchmidtDecomposition& sd) -> Matrix { return sd.system_basis(); })
        .def_property_readonly(
            "env_basis", [](const SchmidtDecomposition& sd) -> Matrix { return sd.env_basis(); })
        .def_property_readonly("rank", &SchmidtDecomposition::rank)
        .def_property_readonly("system_labels", &SchmidtDecomposition::system_labels)
        .def_property_readonly("env_labels", &SchmidtDecomposition::env_labels)
        .def("reconstruct", &SchmidtDecomposition::reconstruct);

    py::class_<DensityMatrix>(m, "DensityMatrix")
        .def(py::init<Matrix>(), py::arg("matrix"))
        .def_property_readonly("matrix",
                               [](const DensityMatrix& rho) -> Matrix { return rho.matrix(); })
        .def_property_readonly("dim", &DensityMatrix::dim)
        .def("eigenvalues", &DensityMatrix::eigenvalues);

    py::class_<SwapSpec>(m, "SwapSpec")
        .def(py::init<Index, Index, double>(), py::arg("i"), py::arg("j"), py::arg("phase") = 0.0)
        .def_readonly("i", &SwapSpec::i)
        .def_readonly("j", &SwapSpec::j)
        .def_readonly("phase", &SwapSpec::phase);

    py::class_<EnvariantDescription>(m, "EnvariantDescription")
        .def_readonly("moduli", &EnvariantDescription::moduli)
        .def_readonly("system_basis", &EnvariantDescription::system_basis);

    py::class_<CounterResult>(m, "CounterResult")
        .def_readonly("counter", &CounterResult::counter)
        .def_readonly("residual", &CounterResult::residual)
        .def_readonly("certificate", &CounterResult::certificate);

    py::class_<Detectability>(m, "Detectability")
        .def_readonly("overlap", &Detectability::overlap)
        .def_readonly("distinguish_prob", &Detectability::distinguish_prob);

    py::class_<FineGraining>(m, "FineGraining")
        .def_readonly("m", &FineGraining::m)
        .def_readonly("M", &FineGraining::M)
        .def_readonly("error_bound", &FineGraining::error_bound)
        .def_readonly("m_lower", &FineGraining::m_lower)
        .def_readonly("m_upper", &FineGraining::m_upper)
        .def_readonly("degenerate", &FineGraining::degenerate)
        .def_property_readonly("interior", &FineGraining::interior)
        .def_property_readonly("exact", &FineGraining::exact);

    py::class_<BornResult>(m, "BornResult")
        .def_readonly("probabilities", &BornResult::probabilities)
        .def_readonly("branch_counts", &BornResult::branch_counts)
        .def_readonly("M", &BornResult::M)
        .def_readonly("error_bound", &BornResult::error_bound)
        .def_property_readonly("method",
                               [](const BornResult& r) { return std::string(to_string(r.method)); });

    py::class_<EnsembleDistribution>(m, "EnsembleDistribution")
        .def_readonly("N", &EnsembleDistribution::N)
        .def_readonly("m", &EnsembleDistribution::m)
        .def_readonly("M", &EnsembleDistribution::M)
        .def_property_readonly(
            "counts", [](const EnsembleDistribution& d) { return counts_to_list(d.counts); })
        .def_readonly("probabilities", &EnsembleDistribution::probabilities);

    // hilbert operations
    m.def(
        "tensor", [](const std::vector<PureState>& states) { return tensor(states); },
        py::arg("states"));
    m.def("apply_local", &apply_local, py::arg("state"), py::arg("u"));
    m.def("schmidt", &schmidt, py::arg("state"), py::arg("cut"));
    m.def("reduced_density", &reduced_density, py::arg("state"), py::arg("keep"));
    m.def("overlap", &overlap, py::arg("a"), py::arg("b"));
    m.def("relabel", &relabel, py::arg("state"), py::arg("labels"));

    // envariance operations
    m.def("envariance_residual", &envariance_residual, py::arg("state"), py::arg("u_S"),
          py::arg("u_E"));
    m.def("envariance_fidelity", &envariance_fidelity, py::arg("state"), py::arg("u_S"),
          py::arg("u_E"));
    m.def("is_envariant", &is_envariant, py::arg("state"), py::arg("u_S"), py::arg("u_E"),
          py::arg("tolerance") = tol::recon);
    m.def(
        "phase_rotation_pair",
        [](const SchmidtDecomposition& sd, const std::vector<double>& phases) {
            return phase_rotation_pair(sd, phases);
        },
        py::arg("sd"), py::arg("phases"));
    m.def("swap_pair", &swap_pair, py::arg("sd"), py::arg("spec"));
    m.def("optimal_counter", &optimal_counter, py::arg("state"), py::arg("u_S"));
    m.def("envariant_description", &envariant_description, py::arg("state"), py::arg("cut"));
    m.def("descriptions_match", &descriptions_match, py::arg("a"), py::arg("b"),
          py::arg("tol_modulus") = tol::eq, py::arg("tol_projector") = tol::recon);
    m.def("swap_detectability", &swap_detectability, py::arg("chi"), py::arg("spec"));

    // fine-graining / Born pipeline
    m.def("equal_coeff_probabilities", &equal_coeff_probabilities, py::arg("sd"));
    m.def(
        "subset_probability",
        [](const SchmidtDecomposition& sd, const std::vector<Index>& subset) {
            return subset_probability(sd, subset);
        },
        py::arg("sd"), py::arg("subset"));
    m.def("rational_approximation", &rational_approximation, py::arg("p"), py::arg("M"));
    m.def("default_denominator", &default_denominator, py::arg("p"), py::arg("tolerance") = 1e-3);
    m.def(
        "build_fine_grained_state",
        [](double phi0, double phi1, const FineGraining& fg) {
            return build_fine_grained_state(phi0, phi1, fg);
        },
        py::arg("phi0"), py::arg("phi1"), py::arg("fg"));
    m.def("apply_cshift", &apply_cshift, py::arg("state"));
    m.def(
        "derive_born",
        [](Complex alpha, Complex beta, std::int64_t M) { return derive_born(alpha, beta, M); },
        py::arg("alpha"), py::arg("beta"), py::arg("M"));
    m.def(
        "derive_born_multi",
        [](const std::vector<Complex>& amplitudes, std::int64_t M) {
            return derive_born(amplitudes, M);
        },
        py::arg("amplitudes"), py::arg("M"));

    // ensemble statistics
    m.def("ensemble_counts", &ensemble_counts, py::arg("N"), py::arg("m"), py::arg("M"));
    m.def("ensemble_probabilities", &ensemble_probabilities, py::arg("N"), py::arg("p0"));
    m.def("gaussian_approx", &gaussian_approx, py::arg("N"), py::arg("p0"), py::arg("n"));
    m.def("ensemble_oracle", &ensemble_oracle, py::arg("N"), py::arg("m"), py::arg("M"));

    // io and configuration
    m.def("load_state", &load_state, py::arg("path"));
    m.def("save_state", &save_state, py::arg("state"), py::arg("path"));
    m.def("state_to_json", &state_to_json, py::arg("state"));
    m.def(
        "parse_inline_state",
        [](const std::string& amps, const std::vector<Index>& dims,
           std::vector<std::string> labels) {
            return parse_inline_state(amps, dims, std::move(labels));
        },
        py::arg("amplitudes"), py::arg("dims"), py::arg("labels") = std::vector<std::string>{});
    m.def("dimension_cap", &dimension_cap);
    m.def("set_dimension_cap", &set_dimension_cap, py::arg("cap"));
    m.def(
        "run_selftest",
        [](std::uint64_t seed) {
            std::ostringstream out;
            const int failures = run_selftest(seed, out);
            return py::make_tuple(failures, out.str());
        },
        py::arg("seed") = 42);
}
