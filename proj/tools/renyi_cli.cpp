#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <renyi/verify.hpp>

namespace {

using namespace renyi;

struct Cell {
    enum class Kind { Num, Int, Text, Empty } kind = Kind::Empty;
    double num = 0.0;
    long long ival = 0;
    std::string text;
};

Cell cnum(double x) {
    Cell c;
    c.kind = Cell::Kind::Num;
    c.num = x;
    return c;
}

Cell cint(long long v) {
    Cell c;
    c.kind = Cell::Kind::Int;
    c.ival = v;
    return c;
}

Cell ctext(std::string s) {
    Cell c;
    c.kind = Cell::Kind::Text;
    c.text = std::move(s);
    return c;
}

Cell cempty() { return Cell{}; }

// Column-oriented result table; conv marks columns measured in nats, which
// are the only ones rescaled when --unit bits is active.
struct Table {
    std::vector<std::string> cols;
    std::vector<bool> conv;
    std::vector<std::vector<Cell>> rows;
};

std::string render_cell_csv(const Cell& c, bool convert, double div) {
    switch (c.kind) {
        case Cell::Kind::Num:
            return format_double(convert ? c.num / div : c.num);
        case Cell::Kind::Int:
            return std::to_string(c.ival);
        case Cell::Kind::Text:
            return c.text;
        default:
            return "";
    }
}

std::string render_cell_json(const Cell& c, bool convert, double div) {
    switch (c.kind) {
        case Cell::Kind::Num:
            return json_token(convert ? c.num / div : c.num);
        case Cell::Kind::Int:
            return std::to_string(c.ival);
        case Cell::Kind::Text:
            return "\"" + c.text + "\"";
        default:
            return "null";
    }
}

std::string render_table(const Table& t, const std::string& format, double div) {
    std::ostringstream os;
    if (format == "json") {
        os << "[\n";
        for (size_t r = 0; r < t.rows.size(); ++r) {
            os << "  {";
            for (size_t i = 0; i < t.cols.size(); ++i) {
                if (i) os << ", ";
                os << "\"" << t.cols[i] << "\": "
                   << render_cell_json(t.rows[r][i], t.conv[i], div);
            }
            os << "}" << (r + 1 < t.rows.size() ? "," : "") << "\n";
        }
        os << "]\n";
    } else {
        for (size_t i = 0; i < t.cols.size(); ++i) os << (i ? "," : "") << t.cols[i];
        os << "\n";
        for (const auto& row : t.rows) {
            for (size_t i = 0; i < t.cols.size(); ++i)
                os << (i ? "," : "") << render_cell_csv(row[i], t.conv[i], div);
            os << "\n";
        }
    }
    return os.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw precondition_error("cannot open output file: " + out_path);
    f << text;
}

StatePair load_pair(const std::string& rho_path, const std::string& sigma_path) {
    StatePair base = canonical_pair();
    PositiveOperator rho = rho_path.empty() ? base.rho : load_operator(rho_path);
    PositiveOperator sigma = sigma_path.empty() ? base.sigma : load_operator(sigma_path);
    return make_state_pair(rho, sigma);
}

std::vector<double> sorted_grid(const std::string& spec) {
    auto g = parse_real_grid(spec);
    std::sort(g.begin(), g.end());
    return g;
}

Table run_divergence(const StatePair& P, const std::string& alpha_spec, const std::string& kind,
                     const std::string& unit) {
    auto alphas = sorted_grid(alpha_spec);
    bool needs_alpha = kind == "table" || kind == "new" || kind == "old" || kind == "recommended";
    if (needs_alpha)
        for (double a : alphas)
            if (a == 1.0) throw std::invalid_argument("alpha=1: use --kind umegaki");
    Table t;
    if (kind == "table") {
        t.cols = {"alpha", "value_old", "value_new", "unit"};
        t.conv = {false, true, true, false};
        for (double a : alphas)
            t.rows.push_back({cnum(a), cnum(renyi_old(P, a)), cnum(renyi_new(P, a)), ctext(unit)});
        return t;
    }
    t.cols = {"kind", "alpha", "value", "unit"};
    t.conv = {false, false, kind != "fidelity", false};
    std::string ucol = kind == "fidelity" ? "none" : unit;
    if (kind == "umegaki") {
        t.rows.push_back({ctext(kind), cempty(), cnum(umegaki(P)), ctext(ucol)});
    } else if (kind == "max") {
        t.rows.push_back({ctext(kind), cempty(), cnum(d_max(P)), ctext(ucol)});
    } else if (kind == "fidelity") {
        t.rows.push_back({ctext(kind), cempty(), cnum(fidelity(P)), ctext(ucol)});
    } else {
        for (double a : alphas) {
            double v = kind == "new"   ? renyi_new(P, a)
                       : kind == "old" ? renyi_old(P, a)
                                       : renyi_recommended(P, a);
            t.rows.push_back({ctext(kind), cnum(a), cnum(v), ctext(ucol)});
        }
    }
    return t;
}

Table run_exponents(const StatePair& P, const std::string& quantity, const std::string& s_spec,
                    const std::string& u_spec, const std::string& a_spec,
                    const std::string& r_spec, const std::string& kappa_spec) {
    ExponentContext C = make_context(P);
    Table t;
    if (quantity == "psi") {
        t.cols = {"s", "psi"};
        t.conv = {false, true};
        for (double s : sorted_grid(s_spec)) t.rows.push_back({cnum(s), cnum(psi(C, s))});
    } else if (quantity == "tilde-psi") {
        t.cols = {"u", "tilde_psi"};
        t.conv = {false, true};
        for (double u : sorted_grid(u_spec)) t.rows.push_back({cnum(u), cnum(tilde_psi(C, u))});
    } else if (quantity == "phi") {
        t.cols = {"a", "phi"};
        t.conv = {true, true};
        for (double a : sorted_grid(a_spec)) t.rows.push_back({cnum(a), cnum(phi(C, a))});
    } else if (quantity == "hoeffding") {
        t.cols = {"r", "Hr"};
        t.conv = {true, true};
        for (double r : sorted_grid(r_spec)) t.rows.push_back({cnum(r), cnum(hoeffding(C, r))});
    } else if (quantity == "converse-hoeffding") {
        t.cols = {"r", "Hr_star", "a_r", "phi"};
        t.conv = {true, true, true, true};
        for (double r : sorted_grid(r_spec)) {
            double hs = converse_hoeffding(C, r);
            double ar = r >= C.r_max ? C.a_max : (r <= C.d_umegaki ? r : solve_ar(C, r));
            double ph = r >= C.r_max ? C.phi_amax : phi(C, ar);
            t.rows.push_back({cnum(r), cnum(hs), cnum(ar), cnum(ph)});
        }
    } else if (quantity == "cutoff") {
        t.cols = {"kappa", "C_kappa", "r_kappa"};
        t.conv = {false, true, true};
        for (double k : sorted_grid(kappa_spec)) {
            auto cr = cutoff_rate(C, k);
            t.rows.push_back({cnum(k), cnum(cr.c_kappa), cnum(cr.r_kappa)});
        }
    } else {  // bipolar
        auto r_grid = sorted_grid(r_spec);
        t.cols = {"u", "bipolar", "tilde_psi"};
        t.conv = {false, true, true};
        for (double u : sorted_grid(u_spec))
            t.rows.push_back({cnum(u), cnum(bipolar_check(C, u, r_grid)), cnum(tilde_psi(C, u))});
    }
    return t;
}

Table run_simulate(const StatePair& P, const std::string& mode, const std::string& n_spec,
                   bool has_a, double a, bool has_r, double r, bool has_eps, double eps) {
    ExponentContext C = make_context(P);
    auto n_list = parse_n_list(n_spec);
    Table t;
    if (mode == "np") {
        if (!has_a) throw std::invalid_argument("simulate np requires --a");
        t.cols = {"n", "a", "alpha_err", "beta_err"};
        t.conv = {false, true, false, false};
        for (int n : n_list) {
            auto bt = np_test(C, n, a, false);
            t.rows.push_back({cint(n), cnum(a), cnum(bt.alpha_err), cnum(bt.beta_err)});
        }
    } else if (mode == "constrained") {
        if (has_r == has_eps)
            throw std::invalid_argument("simulate constrained requires exactly one of --r, --eps");
        if (has_r) {
            double hs = converse_hoeffding(C, r);
            t.cols = {"n", "r", "success", "rate_success", "Hr_star", "bound_ok"};
            t.conv = {false, true, false, true, true, false};
            for (int n : n_list) {
                auto opt = success_under_constraint(C, n, r, false);
                double rate = std::log(std::max(opt.value, 1e-300)) / n;
                t.rows.push_back({cint(n), cnum(r), cnum(opt.value), cnum(rate), cnum(hs),
                                  cint(rate <= -hs + 1e-9 ? 1 : 0)});
            }
        } else {
            t.cols = {"n", "eps", "beta_star", "rate_type2"};
            t.conv = {false, false, false, true};
            for (int n : n_list) {
                auto opt = type2_optimal(C, n, eps, false);
                double rate = std::log(std::max(opt.value, 1e-300)) / n;
                t.rows.push_back({cint(n), cnum(eps), cnum(opt.value), cnum(rate)});
            }
        }
    } else if (mode == "scaled") {
        if (!has_r || !has_a) throw std::invalid_argument("simulate scaled requires --r and --a");
        t.cols = {"n",           "r",          "a",           "alpha_err",     "beta_err",
                  "rate_success", "rate_type2", "limit_success", "limit_type2"};
        t.conv = {false, true, true, false, false, true, true, true, true};
        for (int n : n_list) {
            auto bt = scaled_test(C, n, r, a, false);
            double tr_rho_n = std::pow(P.tr_rho, n);
            double rs = std::log(std::max(tr_rho_n - bt.alpha_err, 1e-300)) / n;
            double rt = std::log(std::max(bt.beta_err, 1e-300)) / n;
            t.rows.push_back({cint(n), cnum(r), cnum(a), cnum(bt.alpha_err), cnum(bt.beta_err),
                              cnum(rs), cnum(rt), cnum(-(r - a)), cnum(-r)});
        }
    } else {  // convergence
        if (!has_a) throw std::invalid_argument("simulate convergence requires --a");
        auto table = exponent_convergence(C, a, n_list);
        t.cols = {"n",           "a",           "phi_a",       "rate_success", "rate_type2",
                  "limit_success", "limit_type2", "dev_success", "dev_type2",    "ok_quotient",
                  "ok_success",    "ok_type2"};
        t.conv = {false, true, true, true, true, true, true, true, true, false, false, false};
        for (const auto& row : table.rows)
            t.rows.push_back({cint(row.n), cnum(table.a), cnum(table.phi_a),
                              cnum(row.rate_success), cnum(row.rate_type2),
                              cnum(table.limit_success), cnum(table.limit_type2),
                              cnum(row.dev_success), cnum(row.dev_type2),
                              cint(row.ok_quotient ? 1 : 0), cint(row.ok_success ? 1 : 0),
                              cint(row.ok_type2 ? 1 : 0)});
    }
    return t;
}

int run_verify(const std::string& which, std::uint64_t seed, long trials,
               const std::string& out_path) {
    auto dims = default_dims();
    auto grid = default_alpha_grid();
    std::vector<CheckReport> reports;
    auto want = [&](const char* name) { return which == "all" || which == name; };
    if (want("alt")) reports.push_back(check_alt(trials ? trials : 200, dims, grid, seed));
    if (want("lieb-thirring"))
        reports.push_back(check_lieb_thirring(trials ? trials : 200, dims, grid, seed));
    if (want("monotonicity"))
        reports.push_back(check_monotonicity(trials ? trials : 100, dims, grid, seed));
    if (want("joint-convexity"))
        reports.push_back(check_joint_convexity(trials ? trials : 100, 3, dims, grid, seed));
    if (want("attainability") || want("strong-converse") || want("cutoff")) {
        ExponentContext C = make_context(canonical_pair());
        if (want("attainability"))
            reports.push_back(check_attainability(C, grid, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
        if (want("strong-converse"))
            reports.push_back(
                check_strong_converse(C, interior_r_grid(C), {1, 2, 3, 4, 5, 6, 7, 8}, grid));
        if (want("cutoff"))
            reports.push_back(check_cutoff(C, {0.25, 0.5, 0.75}, {1, 2, 3, 4, 5, 6, 7, 8}));
    }
    if (want("measured-search"))
        reports.push_back(
            check_measured_search(trials ? trials : 500, dims, {0.1, 0.2, 0.3, 0.4}, seed));
    std::ostringstream os;
    os << "[\n";
    for (size_t i = 0; i < reports.size(); ++i)
        os << to_json(reports[i]) << (i + 1 < reports.size() ? "," : "") << "\n";
    os << "]\n";
    emit(os.str(), out_path);
    for (const auto& r : reports)
        if (!r.passed) return 3;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Renyi divergences, error exponents, and Neyman-Pearson simulation"};
    app.name("renyi");
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_path;
    std::string format = "csv";
    std::string unit = "nats";
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--format", format, "output format (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--unit", unit, "nats or bits; bits rescales nat-valued columns (default nats)")
        ->check(CLI::IsMember({"nats", "bits"}));

    std::string rho_path, sigma_path;
    std::string alpha_spec = "2";
    std::string kind = "table";
    auto* div = app.add_subcommand("divergence", "Renyi divergences of a state pair");
    div->fallthrough();
    div->add_option("--rho", rho_path, "first operator JSON (default: built-in rotated qubit)");
    div->add_option("--sigma", sigma_path, "second operator JSON (default: built-in diagonal qubit)");
    div->add_option("--alpha", alpha_spec, "alpha value or start:end:step range (default 2)");
    div->add_option("--kind", kind, "table | new | old | recommended | umegaki | max | fidelity")
        ->check(CLI::IsMember({"table", "new", "old", "recommended", "umegaki", "max", "fidelity"}));

    std::string quantity;
    std::string s_spec = "0:4:0.5", u_spec = "0.05:0.95:0.05", a_spec = "0:0.4:0.04",
                r_spec = "0:1:0.05", kappa_spec = "0.25:0.75:0.25";
    auto* expc = app.add_subcommand("exponents", "error exponents and Legendre transforms");
    expc->fallthrough();
    expc->add_option("--rho", rho_path, "first operator JSON (default: built-in rotated qubit)");
    expc->add_option("--sigma", sigma_path, "second operator JSON (default: built-in diagonal qubit)");
    expc->add_option("--quantity", quantity,
                     "psi | tilde-psi | phi | hoeffding | converse-hoeffding | cutoff | bipolar")
        ->required()
        ->check(CLI::IsMember(
            {"psi", "tilde-psi", "phi", "hoeffding", "converse-hoeffding", "cutoff", "bipolar"}));
    expc->add_option("--s-grid", s_spec, "s grid for psi (default 0:4:0.5)");
    expc->add_option("--u-grid", u_spec, "u grid for tilde-psi/bipolar (default 0.05:0.95:0.05)");
    expc->add_option("--a-grid", a_spec, "a grid for phi (default 0:0.4:0.04)");
    expc->add_option("--r-grid", r_spec,
                     "r grid for hoeffding/converse-hoeffding/bipolar (default 0:1:0.05)");
    expc->add_option("--kappa-grid", kappa_spec, "kappa grid for cutoff (default 0.25:0.75:0.25)");

    std::string n_spec = "1..8";
    double a_val = 0.0, r_val = 0.0, eps_val = 0.0;
    auto* sim = app.add_subcommand("simulate", "optimal tests on n-fold product states");
    sim->fallthrough();
    sim->add_option("--rho", rho_path, "first operator JSON (default: built-in rotated qubit)");
    sim->add_option("--sigma", sigma_path, "second operator JSON (default: built-in diagonal qubit)");
    sim->add_option("--n", n_spec, "copy count: single n or lo..hi (default 1..8)");
    sim->add_option("--a", a_val, "spectral threshold rate in nats");
    sim->add_option("--r", r_val, "type-II rate constraint in nats");
    sim->add_option("--eps", eps_val, "type-I error budget in [0,1]");
    auto* sim_np = sim->add_subcommand("np", "spectral threshold test at rate a");
    auto* sim_con = sim->add_subcommand("constrained", "optimal test at --r or --eps");
    auto* sim_sc = sim->add_subcommand("scaled", "rescaled threshold test meeting rate r");
    auto* sim_cv = sim->add_subcommand("convergence", "rates of the threshold test against limits");
    for (auto* m : {sim_np, sim_con, sim_sc, sim_cv}) m->fallthrough();

    std::string which;
    std::uint64_t seed = 42;
    long trials = 0;
    auto* ver = app.add_subcommand("verify", "randomized and structural check campaigns");
    ver->fallthrough();
    ver->add_option("check", which, "check name or 'all'")
        ->required()
        ->check(CLI::IsMember({"alt", "lieb-thirring", "monotonicity", "joint-convexity",
                               "attainability", "strong-converse", "cutoff", "measured-search",
                               "all"}));
    ver->add_option("--seed", seed, "campaign seed (default 42)");
    ver->add_option("--trials", trials, "override the per-check default trial count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    double div_factor = unit == "bits" ? std::log(2.0) : 1.0;
    try {
        if (div->parsed()) {
            Table t = run_divergence(load_pair(rho_path, sigma_path), alpha_spec, kind, unit);
            emit(render_table(t, format, div_factor), out_path);
        } else if (expc->parsed()) {
            Table t = run_exponents(load_pair(rho_path, sigma_path), quantity, s_spec, u_spec,
                                    a_spec, r_spec, kappa_spec);
            emit(render_table(t, format, div_factor), out_path);
        } else if (sim->parsed()) {
            std::string mode = "convergence";
            for (auto* m : {sim_np, sim_con, sim_sc, sim_cv})
                if (m->parsed()) mode = m->get_name();
            Table t = run_simulate(load_pair(rho_path, sigma_path), mode, n_spec,
                                   sim->count("--a") > 0, a_val, sim->count("--r") > 0, r_val,
                                   sim->count("--eps") > 0, eps_val);
            emit(render_table(t, format, div_factor), out_path);
        } else if (ver->parsed()) {
            return run_verify(which, seed, trials, out_path);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
