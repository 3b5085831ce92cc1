#include "rdstab/cli.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdstab/errors.hpp"
#include "rdstab/json_io.hpp"
#include "rdstab/leslie.hpp"
#include "rdstab/rds.hpp"
#include "rdstab/spectral.hpp"

namespace rdstab {

namespace {

using nlohmann::ordered_json;

// Shortest round-trip decimal form, identical in text and JSON output.
std::string num(double x) { return ordered_json(x).dump(); }
std::string vec(const Vector& v) { return ordered_json(v).dump(); }

void emit_json(std::ostream& out, const ordered_json& j) { out << j.dump(2) << '\n'; }

struct Options {
    std::string a_path, b_path, d_path;
    std::string coupling;
    std::string kind, flavor;
    std::string verify_path, out_path;
    std::string x0_str, y0_str;
    double tol = 1e-10;
    double margin = 1e-9;
    std::uint64_t seed = 0;
    int budget = 10000;
    std::size_t steps = 100;
    bool json = false;
    bool leslie = false;
};

CouplingKind parse_coupling(const std::string& s) {
    if (s == "diagonal") return CouplingKind::diagonal;
    if (s == "leslie") return CouplingKind::leslie;
    if (s == "leslie-single-row") return CouplingKind::leslie_single_row;
    throw ValidationError("unknown coupling class \"" + s + "\"");
}

void print_certificate_text(std::ostream& out, const Certificate& cert) {
    const ordered_json j = certificate_to_json(cert);
    out << "flavor " << j["flavor"].get<std::string>() << '\n';
    for (const char* key : {"vector", "diag"})
        if (j.contains(key)) out << key << ' ' << j[key].dump() << '\n';
    for (const char* key : {"margin", "rho_s1", "rho_s2", "rho_a", "rho_b"})
        if (j.contains(key)) out << key << ' ' << num(j[key].get<double>()) << '\n';
}

void print_verdict_text(std::ostream& out, const RdsVerdict& v) {
    out << "status " << to_string(v.status) << '\n';
    out << "reason " << to_string(v.reason) << '\n';
    if (v.certificate) print_certificate_text(out, *v.certificate);
    if (v.witness_d) out << "witness_d " << matrix_to_json(*v.witness_d).dump() << '\n';
    if (v.rho_at_witness) out << "rho_at_witness " << num(*v.rho_at_witness) << '\n';
    if (!v.note.empty()) out << "note " << v.note << '\n';
}

int cmd_spectral_radius(const Options& o, std::ostream& out) {
    NonnegMatrix a = load_matrix_file(o.a_path);
    if (o.leslie) validate_leslie(a);
    const SpectralResult r = spectral_radius(a, o.tol);
    if (o.json) {
        ordered_json j;
        j["rho"] = r.rho;
        j["residual"] = r.residual;
        j["perron_vector"] = r.perron_vector ? ordered_json(*r.perron_vector) : ordered_json(nullptr);
        emit_json(out, j);
    } else {
        out << "rho " << num(r.rho) << '\n';
        out << "residual " << num(r.residual) << '\n';
        if (r.perron_vector) out << "perron " << vec(*r.perron_vector) << '\n';
    }
    return 0;
}

int cmd_certify(const Options& o, std::ostream& out) {
    NonnegMatrix a = load_matrix_file(o.a_path);
    NonnegMatrix b = load_matrix_file(o.b_path);
    if (o.leslie) {
        validate_leslie(a);
        validate_leslie(b);
    }

    if (!o.verify_path.empty()) {
        const Certificate cert = load_certificate_file(o.verify_path);
        const bool ok = verify_certificate(a, b, cert);
        if (o.json) {
            ordered_json j;
            j["valid"] = ok;
            emit_json(out, j);
        } else {
            out << (ok ? "certificate valid" : "certificate invalid") << '\n';
        }
        return ok ? 0 : 1;
    }

    // Resolve the requested search: a positional kind (clclf, jlclf, cdlf)
    // optionally refined by --flavor, or --flavor alone, or auto.
    std::string target = "auto";
    if (!o.kind.empty()) {
        if (o.kind == "clclf" || o.kind == "jlclf") {
            if (!o.flavor.empty() && o.flavor != o.kind)
                throw ValidationError("--flavor conflicts with certificate kind " + o.kind);
            target = o.kind;
        } else if (o.kind == "cdlf") {
            std::string f = o.flavor.empty() ? "stein" : o.flavor;
            if (f == "cdlf-stein") f = "stein";
            if (f == "cdlf-lyapunov") f = "lyapunov";
            if (f != "stein" && f != "lyapunov")
                throw ValidationError("cdlf flavor must be stein or lyapunov, got \"" + f + "\"");
            target = "cdlf-" + f;
        } else {
            throw ValidationError("unknown certificate kind \"" + o.kind + "\"");
        }
    } else if (!o.flavor.empty()) {
        target = o.flavor;
        if (target != "auto" && target != "clclf" && target != "jlclf" &&
            target != "cdlf-stein" && target != "cdlf-lyapunov")
            throw ValidationError("unknown certificate flavor \"" + target + "\"");
    }

    std::optional<Certificate> found;
    std::string detail;
    const auto try_one = [&](const std::string& which) {
        if (found) return;
        if (which == "clclf") {
            if (auto c = find_clclf(a, b, o.margin))
                found = *c;
            else
                detail += "clclf: infeasible; ";
        } else if (which == "jlclf") {
            if (auto c = find_jlclf(a, b, o.margin))
                found = *c;
            else
                detail += "jlclf: infeasible; ";
        } else {
            const DiagonalFlavor fl =
                which == "cdlf-stein" ? DiagonalFlavor::stein : DiagonalFlavor::lyapunov;
            const CdlfResult r = find_cdlf(a, b, fl, 500, o.margin);
            if (r.status == CdlfSearchStatus::found)
                found = *r.cert;
            else
                detail += which + ": " +
                          (r.status == CdlfSearchStatus::infeasible ? "infeasible" : "undecided") +
                          "; ";
        }
    };
    if (target == "auto") {
        for (const char* w : {"clclf", "jlclf", "cdlf-lyapunov", "cdlf-stein"}) try_one(w);
    } else {
        try_one(target);
    }

    if (!detail.empty()) detail = detail.substr(0, detail.size() - 2);
    if (found) {
        const bool irr = is_irreducible(a) || is_irreducible(b);
        if (o.json) {
            ordered_json j;
            j["found"] = true;
            j["certificate"] = certificate_to_json(*found);
            j["irreducible"] = irr;
            emit_json(out, j);
        } else {
            out << "found\n";
            print_certificate_text(out, *found);
            out << "irreducible " << (irr ? "true" : "false") << '\n';
        }
        return 0;
    }
    if (o.json) {
        ordered_json j;
        j["found"] = false;
        j["detail"] = detail;
        emit_json(out, j);
    } else {
        out << "no certificate (" << detail << ")\n";
    }
    return 1;
}

int cmd_check_rds(const Options& o, std::ostream& out) {
    const SystemPair pair(load_matrix_file(o.a_path), load_matrix_file(o.b_path),
                          parse_coupling(o.coupling), o.margin, o.tol);
    RdsOptions ro;
    ro.seed = o.seed;
    ro.budget = o.budget;
    ro.feastol = o.margin;
    const RdsVerdict v = decide_rds(pair, ro);
    if (o.json)
        emit_json(out, verdict_to_json(v));
    else
        print_verdict_text(out, v);
    return v.status == RdsStatus::undecided ? 1 : 0;
}

int cmd_find_destabilizer(const Options& o, std::ostream& out) {
    const SystemPair pair(load_matrix_file(o.a_path), load_matrix_file(o.b_path),
                          parse_coupling(o.coupling), o.margin, o.tol);
    const auto hit = find_destabilizer(pair, o.budget, o.seed, o.margin);
    if (o.json) {
        ordered_json j;
        j["found"] = static_cast<bool>(hit);
        j["d"] = hit ? matrix_to_json(hit->first) : ordered_json(nullptr);
        j["rho"] = hit ? ordered_json(hit->second) : ordered_json(nullptr);
        j["seed"] = o.seed;
        j["budget"] = o.budget;
        emit_json(out, j);
    } else if (hit) {
        out << "found\n";
        out << "d " << matrix_to_json(hit->first).dump() << '\n';
        out << "rho " << num(hit->second) << '\n';
    } else {
        out << "no destabilizer found within budget " << o.budget << '\n';
    }
    return hit ? 0 : 1;
}

int cmd_rho_coupled(const Options& o, std::ostream& out) {
    NonnegMatrix a = load_matrix_file(o.a_path);
    NonnegMatrix b = load_matrix_file(o.b_path);
    NonnegMatrix d = load_matrix_file(o.d_path);
    if (o.leslie) {
        validate_leslie(a);
        validate_leslie(b);
    }
    double rho;
    if (!o.coupling.empty()) {
        const SystemPair pair(a, b, parse_coupling(o.coupling), o.margin, o.tol);
        rho = rho_coupled(pair, d);
    } else {
        rho = spectral_radius(CoupledMatrix(a, b, d).matrix(), o.tol).rho;
    }
    if (o.json) {
        ordered_json j;
        j["rho"] = rho;
        emit_json(out, j);
    } else {
        out << "rho " << num(rho) << '\n';
    }
    return 0;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    NonnegMatrix a = load_matrix_file(o.a_path);
    NonnegMatrix b = load_matrix_file(o.b_path);
    NonnegMatrix d = load_matrix_file(o.d_path);
    if (o.leslie) {
        validate_leslie(a);
        validate_leslie(b);
    }
    const std::size_t n = a.dim();
    const auto parse_state = [&](const std::string& s, const char* what) {
        if (s.empty()) return Vector(n, 1.0);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(s);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(std::string(what) + ": " + e.what());
        }
        Vector v = vector_from_json(j, what);
        if (v.size() != n) throw ValidationError(std::string(what) + " must have n entries");
        return v;
    };
    const Vector x0 = parse_state(o.x0_str, "x0");
    const Vector y0 = parse_state(o.y0_str, "y0");

    Trajectory tr;
    if (!o.coupling.empty()) {
        const SystemPair pair(a, b, parse_coupling(o.coupling), o.margin, o.tol);
        tr = simulate_coupled(pair, d, x0, y0, o.steps);
    } else {
        tr = simulate_coupled(CoupledMatrix(a, b, d), x0, y0, o.steps);
    }

    if (!o.out_path.empty()) {
        std::ofstream csv(o.out_path);
        if (!csv) throw ValidationError("cannot write " + o.out_path);
        csv << "t";
        for (std::size_t i = 0; i < n; ++i) csv << ",x" << i;
        for (std::size_t i = 0; i < n; ++i) csv << ",y" << i;
        csv << "\n";
        for (std::size_t t = 0; t < tr.x.size(); ++t) {
            csv << t;
            for (double v : tr.x[t]) csv << ',' << num(v);
            for (double v : tr.y[t]) csv << ',' << num(v);
            csv << "\n";
        }
    }
    if (o.json) {
        ordered_json j;
        j["steps_recorded"] = tr.x.size() - 1;
        j["growth_estimate"] = tr.growth_estimate;
        j["divergent"] = tr.divergent;
        emit_json(out, j);
    } else {
        out << "steps_recorded " << tr.x.size() - 1 << '\n';
        out << "growth_estimate " << num(tr.growth_estimate) << '\n';
        out << "divergent " << (tr.divergent ? "true" : "false") << '\n';
    }
    return 0;
}

int cmd_row_selections(const Options& o, std::ostream& out) {
    NonnegMatrix a = load_matrix_file(o.a_path);
    NonnegMatrix b = load_matrix_file(o.b_path);
    if (o.leslie) {
        validate_leslie(a);
        validate_leslie(b);
    }
    const auto sels = row_selections(a, b);
    bool all_schur = true;
    ordered_json rows = ordered_json::array();
    for (const auto& s : sels) {
        const double rho = spectral_radius(s.matrix, o.tol).rho;
        const bool schur = rho < 1.0 - o.margin;
        all_schur = all_schur && schur;
        if (o.json) {
            ordered_json r;
            r["mask"] = s.mask;
            r["rho"] = rho;
            r["schur"] = schur;
            rows.push_back(std::move(r));
        } else {
            out << "mask " << s.mask << " rho " << num(rho) << " schur "
                << (schur ? "true" : "false") << '\n';
        }
    }
    if (o.json) {
        ordered_json j;
        j["selections"] = std::move(rows);
        j["all_schur"] = all_schur;
        emit_json(out, j);
    } else {
        out << "all_schur " << (all_schur ? "true" : "false") << '\n';
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"certify or refute robust diffusive stability of coupled nonnegative systems",
                 "rdstab"};
    app.require_subcommand(1);

    const auto add_common = [&](CLI::App* sub, bool with_b) {
        sub->add_option("-a,--a", o.a_path, "first system matrix (JSON)")->required();
        if (with_b) sub->add_option("-b,--b", o.b_path, "second system matrix (JSON)")->required();
        sub->add_option("--tol", o.tol, "eigenvalue tolerance");
        sub->add_option("--margin", o.margin, "Schur margin and LP feasibility threshold");
        sub->add_flag("--json", o.json, "JSON output");
        sub->add_flag("--leslie", o.leslie, "validate the Leslie pattern on load");
    };

    CLI::App* sr = app.add_subcommand("spectral-radius", "spectral radius of one matrix");
    add_common(sr, false);

    CLI::App* ce = app.add_subcommand("certify", "search for or verify a stability certificate");
    add_common(ce, true);
    ce->add_option("kind", o.kind, "certificate kind: clclf, jlclf, cdlf");
    ce->add_option("--flavor", o.flavor,
                   "clclf, jlclf, cdlf-stein, cdlf-lyapunov, auto (or stein/lyapunov with cdlf)");
    ce->add_option("--verify", o.verify_path, "verify this certificate file instead of searching");

    CLI::App* ck = app.add_subcommand("check-rds", "decide robust diffusive stability");
    add_common(ck, true);
    ck->add_option("--coupling", o.coupling, "diagonal, leslie, leslie-single-row")
        ->required()
        ->check(CLI::IsMember({"diagonal", "leslie", "leslie-single-row"}));
    ck->add_option("--seed", o.seed, "search seed");
    ck->add_option("--budget", o.budget, "destabilizer search budget (rho evaluations)");

    CLI::App* fd = app.add_subcommand("find-destabilizer", "search for a destabilizing coupling");
    add_common(fd, true);
    fd->add_option("--coupling", o.coupling, "diagonal, leslie, leslie-single-row")
        ->required()
        ->check(CLI::IsMember({"diagonal", "leslie", "leslie-single-row"}));
    fd->add_option("--seed", o.seed, "search seed");
    fd->add_option("--budget", o.budget, "search budget (rho evaluations)");

    CLI::App* rc = app.add_subcommand("rho-coupled", "spectral radius of the coupled map");
    add_common(rc, true);
    rc->add_option("-d,--d", o.d_path, "coupling matrix (JSON)")->required();
    rc->add_option("--coupling", o.coupling, "also enforce this coupling class")
        ->check(CLI::IsMember({"diagonal", "leslie", "leslie-single-row"}));

    CLI::App* si = app.add_subcommand("simulate", "simulate the coupled pair");
    add_common(si, true);
    si->add_option("-d,--d", o.d_path, "coupling matrix (JSON)")->required();
    si->add_option("--coupling", o.coupling, "also enforce this coupling class")
        ->check(CLI::IsMember({"diagonal", "leslie", "leslie-single-row"}));
    si->add_option("--steps", o.steps, "number of steps");
    si->add_option("--x0", o.x0_str, "initial x state as a JSON array (default all ones)");
    si->add_option("--y0", o.y0_str, "initial y state as a JSON array (default all ones)");
    si->add_option("--out", o.out_path, "write the trajectory as CSV");

    CLI::App* rs = app.add_subcommand("row-selections", "all 2^n row selections of a pair");
    add_common(rs, true);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sr->parsed()) return cmd_spectral_radius(o, out);
        if (ce->parsed()) return cmd_certify(o, out);
        if (ck->parsed()) return cmd_check_rds(o, out);
        if (fd->parsed()) return cmd_find_destabilizer(o, out);
        if (rc->parsed()) return cmd_rho_coupled(o, out);
        if (si->parsed()) return cmd_simulate(o, out);
        if (rs->parsed()) return cmd_row_selections(o, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const LpError& e) {
        err << "lp error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return 2;
    }
    err << "error: no subcommand\n";
    return 2;
}

} // namespace rdstab
