#include "rdstab/json_io.hpp"

#include <cmath>
#include <fstream>

#include "rdstab/errors.hpp"

namespace rdstab {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double finite_number(const json& j, const char* what) {
    if (!j.is_number()) throw ValidationError(std::string(what) + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
    return v;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

} // namespace

Vector vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
    Vector v;
    v.reserve(j.size());
    for (const auto& x : j) v.push_back(finite_number(x, what));
    return v;
}

NonnegMatrix matrix_from_json(const json& j, double slack) {
    if (!j.is_object()) throw ValidationError("matrix document must be an object");
    if (!j.contains("n") || !j.contains("rows"))
        throw ValidationError("matrix document needs fields \"n\" and \"rows\"");
    if (!j["n"].is_number_unsigned() && !j["n"].is_number_integer())
        throw ValidationError("matrix field \"n\" must be an integer");
    const auto n = j["n"].get<long long>();
    if (n < 1) throw ValidationError("matrix dimension must be >= 1");
    const auto& rows = j["rows"];
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n))
        throw ValidationError("matrix \"rows\" must hold exactly n rows");
    std::vector<Vector> data;
    for (const auto& r : rows) {
        Vector row = vector_from_json(r, "matrix row");
        if (row.size() != static_cast<std::size_t>(n))
            throw ValidationError("matrix row length differs from n");
        data.push_back(std::move(row));
    }
    return NonnegMatrix::from_rows(data, slack);
}

ordered_json matrix_to_json(const NonnegMatrix& m) {
    ordered_json j;
    j["n"] = m.dim();
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t k = 0; k < m.dim(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

NonnegMatrix load_matrix_file(const std::string& path, double slack) {
    try {
        return matrix_from_json(parse_file(path), slack);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

ordered_json certificate_to_json(const Certificate& c) {
    ordered_json j;
    if (const auto* cop = std::get_if<CopositiveCert>(&c)) {
        j["flavor"] = cop->flavor == CopositiveFlavor::clclf ? "clclf" : "jlclf";
        j["vector"] = cop->v;
        j["margin"] = cop->margin;
    } else if (const auto* d = std::get_if<DiagonalCert>(&c)) {
        j["flavor"] = d->flavor == DiagonalFlavor::stein ? "cdlf-stein" : "cdlf-lyapunov";
        j["diag"] = d->e;
        j["margin"] = d->margin;
    } else if (const auto* rv = std::get_if<RightVectorCert>(&c)) {
        j["flavor"] = "right-vector";
        j["vector"] = rv->v;
        j["margin"] = rv->margin;
    } else if (const auto* env = std::get_if<EnvelopeCert>(&c)) {
        j["flavor"] = "s1-s2-envelope";
        j["rho_s1"] = env->rho_s1;
        j["rho_s2"] = env->rho_s2;
    } else if (const auto* st = std::get_if<StructureCert>(&c)) {
        j["flavor"] = "single-row-structure";
        j["rho_a"] = st->rho_a;
        j["rho_b"] = st->rho_b;
    }
    return j;
}

Certificate certificate_from_json(const json& j) {
    if (!j.is_object() || !j.contains("flavor"))
        throw ValidationError("certificate document needs a \"flavor\" field");
    const std::string flavor = j["flavor"].get<std::string>();
    const auto margin_of = [&]() {
        if (!j.contains("margin")) throw ValidationError("certificate needs a \"margin\" field");
        return finite_number(j["margin"], "certificate margin");
    };
    if (flavor == "clclf" || flavor == "jlclf") {
        if (!j.contains("vector")) throw ValidationError("copositive certificate needs \"vector\"");
        CopositiveCert c;
        c.flavor = flavor == "clclf" ? CopositiveFlavor::clclf : CopositiveFlavor::jlclf;
        c.v = vector_from_json(j["vector"], "certificate vector");
        c.margin = margin_of();
        return c;
    }
    if (flavor == "cdlf-stein" || flavor == "cdlf-lyapunov") {
        if (!j.contains("diag")) throw ValidationError("diagonal certificate needs \"diag\"");
        DiagonalCert c;
        c.flavor = flavor == "cdlf-stein" ? DiagonalFlavor::stein : DiagonalFlavor::lyapunov;
        c.e = vector_from_json(j["diag"], "certificate diag");
        c.margin = margin_of();
        return c;
    }
    if (flavor == "right-vector") {
        if (!j.contains("vector")) throw ValidationError("right-vector certificate needs \"vector\"");
        RightVectorCert c;
        c.v = vector_from_json(j["vector"], "certificate vector");
        c.margin = margin_of();
        return c;
    }
    if (flavor == "s1-s2-envelope") {
        if (!j.contains("rho_s1") || !j.contains("rho_s2"))
            throw ValidationError("envelope certificate needs \"rho_s1\" and \"rho_s2\"");
        return EnvelopeCert{finite_number(j["rho_s1"], "rho_s1"),
                            finite_number(j["rho_s2"], "rho_s2")};
    }
    if (flavor == "single-row-structure") {
        if (!j.contains("rho_a") || !j.contains("rho_b"))
            throw ValidationError("structure certificate needs \"rho_a\" and \"rho_b\"");
        return StructureCert{finite_number(j["rho_a"], "rho_a"),
                             finite_number(j["rho_b"], "rho_b")};
    }
    throw ValidationError("unknown certificate flavor \"" + flavor + "\"");
}

Certificate load_certificate_file(const std::string& path) {
    try {
        return certificate_from_json(parse_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(e.what()).rfind(path, 0) == 0
                                  ? e.what()
                                  : path + ": " + e.what());
    }
}

ordered_json verdict_to_json(const RdsVerdict& v) {
    ordered_json j;
    j["status"] = to_string(v.status);
    j["reason"] = to_string(v.reason);
    j["certificate"] = v.certificate ? certificate_to_json(*v.certificate) : ordered_json(nullptr);
    j["witness_d"] = v.witness_d ? matrix_to_json(*v.witness_d) : ordered_json(nullptr);
    j["rho_at_witness"] = v.rho_at_witness ? ordered_json(*v.rho_at_witness) : ordered_json(nullptr);
    j["seed"] = v.seed;
    j["budget"] = v.budget;
    j["note"] = v.note;
    return j;
}

} // namespace rdstab
