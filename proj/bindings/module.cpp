#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "rdstab/certificates.hpp"
#include "rdstab/errors.hpp"
#include "rdstab/json_io.hpp"
#include "rdstab/leslie.hpp"
#include "rdstab/matrix.hpp"
#include "rdstab/rds.hpp"
#include "rdstab/spectral.hpp"

namespace py = pybind11;
using namespace rdstab;

namespace {

CouplingKind parse_coupling(const std::string& s) {
    if (s == "diagonal") return CouplingKind::diagonal;
    if (s == "leslie") return CouplingKind::leslie;
    if (s == "leslie-single-row" || s == "leslie_single_row")
        return CouplingKind::leslie_single_row;
    throw ValidationError("unknown coupling class \"" + s + "\"");
}

NonnegMatrix matrix_from_rows(const std::vector<Vector>& rows) {
    return NonnegMatrix::from_rows(rows, 1e-12);
}

std::vector<Vector> rows_of(const NonnegMatrix& m) {
    std::vector<Vector> rows(m.dim(), Vector(m.dim()));
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) rows[i][j] = m(i, j);
    return rows;
}

py::object json_to_py(const nlohmann::ordered_json& j) {
    switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer: return py::int_(j.get<long long>());
    case nlohmann::json::value_t::number_unsigned:
        return py::int_(j.get<unsigned long long>());
    case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
    case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
        py::list out;
        for (const auto& item : j) out.append(json_to_py(item));
        return out;
    }
    case nlohmann::json::value_t::object: {
        py::dict out;
        for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
        return out;
    }
    default: return py::none();
    }
}

py::object copositive_to_py(const std::optional<CopositiveCert>& c) {
    if (!c) return py::none();
    py::dict d;
    d["flavor"] = c->flavor == CopositiveFlavor::clclf ? "clclf" : "jlclf";
    d["v"] = c->v;
    d["margin"] = c->margin;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "certify or refute robust diffusive stability of coupled nonnegative systems";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

    py::class_<NonnegMatrix>(m, "NonnegMatrix")
        .def(py::init(&matrix_from_rows), py::arg("rows"))
        .def_property_readonly("dim", &NonnegMatrix::dim)
        .def("rows", &rows_of)
        .def("__getitem__",
             [](const NonnegMatrix& mm, std::pair<std::size_t, std::size_t> ij) {
                 if (ij.first >= mm.dim() || ij.second >= mm.dim())
                     throw py::index_error("matrix index out of range");
                 return mm(ij.first, ij.second);
             })
        .def("__repr__", [](const NonnegMatrix& mm) {
            return "NonnegMatrix(" + matrix_to_json(mm).dump() + ")";
        });

    m.def(
        "spectral_radius",
        [](const NonnegMatrix& a, double tol) {
            const SpectralResult r = spectral_radius(a, tol);
            py::dict d;
            d["rho"] = r.rho;
            d["residual"] = r.residual;
            d["perron_vector"] = r.perron_vector ? py::cast(*r.perron_vector) : py::none();
            return d;
        },
        py::arg("a"), py::arg("tol") = 1e-10);
    m.def("is_schur", &is_schur, py::arg("a"), py::arg("margin") = 1e-9);
    m.def("is_irreducible", &is_irreducible, py::arg("a"));

    m.def(
        "couple",
        [](const NonnegMatrix& a, const NonnegMatrix& b, const NonnegMatrix& d) {
            return CoupledMatrix(a, b, d).matrix();
        },
        py::arg("a"), py::arg("b"), py::arg("d"),
        "assemble the 2n coupled map [[A-D, D], [D, B-D]]");
    m.def(
        "rho_coupled",
        [](const NonnegMatrix& a, const NonnegMatrix& b, const NonnegMatrix& d, double tol) {
            return spectral_radius(CoupledMatrix(a, b, d).matrix(), tol).rho;
        },
        py::arg("a"), py::arg("b"), py::arg("d"), py::arg("tol") = 1e-10);

    m.def(
        "find_clclf",
        [](const NonnegMatrix& a, const NonnegMatrix& b, double feastol) {
            return copositive_to_py(find_clclf(a, b, feastol));
        },
        py::arg("a"), py::arg("b"), py::arg("feastol") = 1e-9);
    m.def(
        "find_jlclf",
        [](const NonnegMatrix& a, const NonnegMatrix& b, double feastol) {
            return copositive_to_py(find_jlclf(a, b, feastol));
        },
        py::arg("a"), py::arg("b"), py::arg("feastol") = 1e-9);
    m.def(
        "find_cdlf",
        [](const NonnegMatrix& a, const NonnegMatrix& b, const std::string& flavor, int max_cuts,
           double feastol) {
            DiagonalFlavor fl;
            if (flavor == "stein")
                fl = DiagonalFlavor::stein;
            else if (flavor == "lyapunov")
                fl = DiagonalFlavor::lyapunov;
            else
                throw ValidationError("flavor must be \"stein\" or \"lyapunov\"");
            const CdlfResult r = find_cdlf(a, b, fl, max_cuts, feastol);
            py::dict d;
            d["status"] = r.status == CdlfSearchStatus::found      ? "found"
                          : r.status == CdlfSearchStatus::infeasible ? "infeasible"
                                                                     : "undecided";
            d["e"] = r.cert ? py::cast(r.cert->e) : py::none();
            d["margin"] = r.cert ? py::cast(r.cert->margin) : py::none();
            d["cuts"] = r.cuts;
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("flavor"), py::arg("max_cuts") = 500,
        py::arg("feastol") = 1e-9);

    m.def(
        "verify_copositive_cert",
        [](const NonnegMatrix& a, const NonnegMatrix& b, const std::string& flavor,
           const Vector& v, double margin) {
            CopositiveCert c;
            c.flavor = flavor == "clclf" ? CopositiveFlavor::clclf : CopositiveFlavor::jlclf;
            c.v = v;
            c.margin = margin;
            return verify_copositive_cert(a, b, c);
        },
        py::arg("a"), py::arg("b"), py::arg("flavor"), py::arg("v"), py::arg("margin"));
    m.def(
        "verify_diagonal_cert",
        [](const NonnegMatrix& a, const NonnegMatrix& b, const std::string& flavor,
           const Vector& e, double margin) {
            DiagonalCert c;
            c.flavor = flavor == "stein" ? DiagonalFlavor::stein : DiagonalFlavor::lyapunov;
            c.e = e;
            c.margin = margin;
            return verify_diagonal_cert(a, b, c);
        },
        py::arg("a"), py::arg("b"), py::arg("flavor"), py::arg("e"), py::arg("margin"));

    m.def(
        "validate_leslie",
        [](const NonnegMatrix& a) {
            const LeslieMatrix l = validate_leslie(a);
            py::dict d;
            d["fertility"] = l.fertility;
            d["survival"] = l.survival;
            d["corner"] = l.corner;
            return d;
        },
        py::arg("a"));
    m.def(
        "build_s1_s2",
        [](const NonnegMatrix& a, const NonnegMatrix& b) {
            auto [s1, s2] = build_s1_s2(a, b);
            return py::make_tuple(s1.matrix, s2.matrix);
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "row_selections",
        [](const NonnegMatrix& a, const NonnegMatrix& b) {
            py::list out;
            for (const auto& sel : row_selections(a, b))
                out.append(py::make_tuple(sel.mask, sel.matrix));
            return out;
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "common_right_vector",
        [](const NonnegMatrix& a, const NonnegMatrix& b, double feastol) -> py::object {
            const auto w = common_right_vector(a, b, feastol);
            if (!w) return py::none();
            py::dict d;
            d["v"] = w->v;
            d["margin"] = w->margin;
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("feastol") = 1e-9);
    m.def(
        "enumerate_coupling_class",
        [](const NonnegMatrix& a, const NonnegMatrix& b, const std::string& kind,
           std::size_t resolution, std::uint64_t seed, std::size_t random_samples) {
            return enumerate_coupling_class(a, b, parse_coupling(kind), resolution, seed,
                                            random_samples);
        },
        py::arg("a"), py::arg("b"), py::arg("kind"), py::arg("resolution"), py::arg("seed") = 0,
        py::arg("random_samples") = 0);

    m.def(
        "check_rds",
        [](const NonnegMatrix& a, const NonnegMatrix& b, const std::string& coupling,
           std::uint64_t seed, int budget, double schur_margin, double tol) {
            const SystemPair pair(a, b, parse_coupling(coupling), schur_margin, tol);
            RdsOptions opt;
            opt.seed = seed;
            opt.budget = budget;
            opt.feastol = schur_margin;
            return json_to_py(verdict_to_json(decide_rds(pair, opt)));
        },
        py::arg("a"), py::arg("b"), py::arg("coupling"), py::arg("seed") = 0,
        py::arg("budget") = 10000, py::arg("schur_margin") = 1e-9, py::arg("tol") = 1e-10,
        "decide robust diffusive stability; returns the verdict as a dict");
    m.def(
        "find_destabilizer",
        [](const NonnegMatrix& a, const NonnegMatrix& b, const std::string& coupling, int budget,
           std::uint64_t seed, double schur_margin, double tol) -> py::object {
            const SystemPair pair(a, b, parse_coupling(coupling), schur_margin, tol);
            const auto hit = find_destabilizer(pair, budget, seed, schur_margin);
            if (!hit) return py::none();
            return py::make_tuple(hit->first, hit->second);
        },
        py::arg("a"), py::arg("b"), py::arg("coupling"), py::arg("budget") = 10000,
        py::arg("seed") = 0, py::arg("schur_margin") = 1e-9, py::arg("tol") = 1e-10);
    m.def(
        "simulate",
        [](const NonnegMatrix& a, const NonnegMatrix& b, const NonnegMatrix& d, const Vector& x0,
           const Vector& y0, std::size_t steps) {
            const Trajectory tr = simulate_coupled(CoupledMatrix(a, b, d), x0, y0, steps);
            py::dict out;
            out["x"] = tr.x;
            out["y"] = tr.y;
            out["growth_estimate"] = tr.growth_estimate;
            out["divergent"] = tr.divergent;
            return out;
        },
        py::arg("a"), py::arg("b"), py::arg("d"), py::arg("x0"), py::arg("y0"),
        py::arg("steps") = 100);
}
