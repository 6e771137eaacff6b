/*
 * scenario: JSON in and out, fixture files, and the check / split commands.
 */
#include "qsplit/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

namespace qsplit {

using json = nlohmann::json;

namespace {

// ------------------------------------------------------------------ reading

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::ParseError, "field '" + path + "': " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) bad_field(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) bad_field(path.empty() ? key : path + "." + key, "missing");
    return *it;
}

std::string sub(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string sub(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& array_of(const json& j, const std::string& path, std::optional<std::size_t> size = std::nullopt) {
    if (!j.is_array()) bad_field(path, "expected an array");
    if (size && j.size() != *size)
        bad_field(path, "expected " + std::to_string(*size) + " entries, found " + std::to_string(j.size()));
    return j;
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) bad_field(path, "expected an integer");
    return j.get<int>();
}

double get_double(const json& j, const std::string& path) {
    if (!j.is_number()) bad_field(path, "expected a number");
    return j.get<double>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) bad_field(path, "expected a string");
    return j.get<std::string>();
}

IntMatrix get_int_matrix(const json& j, const std::string& path) {
    IntMatrix m;
    for (std::size_t r = 0; r < array_of(j, path).size(); ++r) {
        std::vector<int> row;
        const json& jr = array_of(j[r], sub(path, r));
        for (std::size_t c = 0; c < jr.size(); ++c) row.push_back(get_int(jr[c], sub(sub(path, r), c)));
        if (!m.empty() && row.size() != m.front().size()) throw Error(ErrorCode::ValidationError, "ragged rows in " + path);
        m.push_back(std::move(row));
    }
    return m;
}

cplx get_cplx(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) bad_field(path, "expected a complex number [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

CMatrix get_matrix(const json& j, std::size_t rows, std::size_t cols, const std::string& path) {
    if (array_of(j, path).size() != rows)
        throw Error(ErrorCode::ValidationError, path + ": expected " + std::to_string(rows) + " rows, found " + std::to_string(j.size()));
    CMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const json& jr = j[r];
        if (!jr.is_array() || jr.size() != cols)
            throw Error(ErrorCode::ValidationError, path + ": row " + std::to_string(r) + " should have " + std::to_string(cols) + " entries");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = get_cplx(jr[c], sub(sub(path, r), c));
    }
    return m;
}

Mor get_mor(const json& j, const Obj& src, const Obj& dst, const std::string& path) {
    array_of(j, path, src.mult.size());
    Mor f = Mor::zero(src, dst);
    for (std::size_t i = 0; i < src.mult.size(); ++i)
        f.blocks[i] = get_matrix(j[i], static_cast<std::size_t>(dst.mult[i]), static_cast<std::size_t>(src.mult[i]), sub(path, i));
    return f;
}

NatTrans get_nat(const json& j, const Functor& from, const Functor& to, const std::string& path) {
    const SCatPtr& c = from.src();
    array_of(j, path, c->size());
    NatTrans eta = NatTrans::zero(from, to);
    for (std::size_t s = 0; s < c->size(); ++s) {
        const Obj x = simple_obj(c, s);
        eta.comps[s] = get_mor(j[s], from.apply(x), to.apply(x), sub(path, s));
    }
    return eta;
}

// ------------------------------------------------------------------ writing

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const CMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(cplx_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

json mor_json(const Mor& f) {
    json out = json::array();
    for (const CMatrix& b : f.blocks) out.push_back(matrix_json(b));
    return out;
}

json nat_json(const NatTrans& eta) {
    json out = json::array();
    for (const Mor& m : eta.comps) out.push_back(mor_json(m));
    return out;
}

json tol_json(const TolerancePolicy& t) { return json{{"eps_num", t.eps_num}, {"tau_rel", t.tau_rel}}; }

// ------------------------------------------------------------------ assembly

ZeroCellPtr build_base(const Scenario& s) {
    std::vector<SCatPtr> cats;
    for (int k = 0; k <= s.depth; ++k) cats.push_back(make_scat("M" + std::to_string(k), s.labels[static_cast<std::size_t>(k)]));
    return make_zero_cell(s.name + "_tower", cats, s.gammas);
}

QSystem explicit_qsystem(const Scenario& s, const json& src) {
    const int K = s.depth;
    const auto n = static_cast<std::size_t>(K + 1);
    const json& jl = array_of(field(src, "lambdas", "q_source"), "q_source.lambdas", n);
    auto q = std::make_shared<OneCell>();
    q->name = "Q";
    q->from = q->to = s.base;
    for (int k = 0; k <= K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const SCatPtr& c = s.base->cats[uk];
        const IntMatrix a = get_int_matrix(jl[uk], sub("q_source.lambdas", uk));
        if (a.size() != c->size() || (a.size() > 0 && a.front().size() != c->size()))
            throw Error(ErrorCode::ValidationError, "q_source.lambdas[" + std::to_string(k) + "] is not square over M_" + std::to_string(k));
        q->lambdas.push_back(Functor::basic(c, c, a));
    }
    const json& jc = array_of(field(src, "connections", "q_source"), "q_source.connections", static_cast<std::size_t>(K));
    q->conns.emplace_back();
    for (int k = 1; k <= K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const Functor& g = s.base->gamma(k);
        q->conns.push_back(get_nat(jc[uk - 1], functor_compose(g, q->lambdas[uk - 1]), functor_compose(q->lambdas[uk], g),
                                   sub("q_source.connections", uk - 1)));
    }
    const json& jm = array_of(field(src, "m", "q_source"), "q_source.m", n);
    const json& ji = array_of(field(src, "i", "q_source"), "q_source.i", n);
    std::vector<NatTrans> m, i;
    for (int k = 0; k <= K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const Functor& Q = q->lambdas[uk];
        m.push_back(get_nat(jm[uk], functor_compose(Q, Q), Q, sub("q_source.m", uk)));
        i.push_back(get_nat(ji[uk], Functor::identity(Q.src()), Q, sub("q_source.i", uk)));
    }
    return make_qsystem(s.name, q, std::move(m), std::move(i));
}

json scenario_json(const Scenario& s, bool explicit_form) {
    json j;
    j["name"] = s.name;
    j["depth"] = s.depth;
    json cats = json::array();
    for (const auto& l : s.labels) cats.push_back(json{{"labels", l}});
    j["categories"] = cats;
    j["gammas"] = s.gammas;
    json src;
    if (explicit_form) {
        src["kind"] = "explicit";
        json lam = json::array(), conns = json::array(), m = json::array(), i = json::array();
        for (int k = 0; k <= s.depth; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            lam.push_back(s.q.q->lambdas[uk].mult());
            if (k >= 1) conns.push_back(nat_json(s.q.q->conns[uk]));
            m.push_back(nat_json(s.q.m.at(k)));
            i.push_back(nat_json(s.q.i.at(k)));
        }
        src["lambdas"] = lam;
        src["connections"] = conns;
        src["m"] = m;
        src["i"] = i;
    } else {
        src = json{{"kind", "generated"}, {"fixture", s.spec.kind}, {"n", s.spec.n},     {"seed", s.spec.seed},
                   {"l0", s.spec.l0},     {"m_scale", s.spec.m_scale}};
    }
    j["q_source"] = src;
    if (s.tol) j["tolerances"] = tol_json(*s.tol);
    return j;
}

}  // namespace

Scenario scenario_from_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what());
    }
    Scenario s;
    s.name = get_string(field(j, "name", ""), "name");
    s.depth = get_int(field(j, "depth", ""), "depth");
    if (s.depth < 1 || s.depth > 5) throw Error(ErrorCode::ValidationError, "depth must lie in [1, 5]");
    const auto n = static_cast<std::size_t>(s.depth + 1);
    const json& cats = array_of(field(j, "categories", ""), "categories", n);
    for (std::size_t k = 0; k < n; ++k) {
        const json& jl = array_of(field(cats[k], "labels", sub("categories", k)), sub(sub("categories", k), "labels"));
        std::vector<std::string> labels;
        for (std::size_t t = 0; t < jl.size(); ++t) labels.push_back(get_string(jl[t], sub(sub(sub("categories", k), "labels"), t)));
        if (labels.empty()) throw Error(ErrorCode::ValidationError, "M_" + std::to_string(k) + " has no simples");
        s.labels.push_back(std::move(labels));
    }
    const json& gs = array_of(field(j, "gammas", ""), "gammas", static_cast<std::size_t>(s.depth));
    for (std::size_t k = 0; k < gs.size(); ++k) s.gammas.push_back(get_int_matrix(gs[k], sub("gammas", k)));
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        TolerancePolicy tol;
        if (t.contains("eps_num")) tol.eps_num = get_double(t["eps_num"], "tolerances.eps_num");
        if (t.contains("tau_rel")) tol.tau_rel = get_double(t["tau_rel"], "tolerances.tau_rel");
        tol.validate();
        s.tol = tol;
    }
    s.base = build_base(s);

    const json& src = field(j, "q_source", "");
    s.source = get_string(field(src, "kind", "q_source"), "q_source.kind");
    if (s.source == "generated") {
        s.spec.kind = get_string(field(src, "fixture", "q_source"), "q_source.fixture");
        s.spec.depth = s.depth;
        if (src.contains("n")) s.spec.n = get_int(src["n"], "q_source.n");
        if (src.contains("seed")) {
            if (!src["seed"].is_number_unsigned()) bad_field("q_source.seed", "expected a non-negative integer");
            s.spec.seed = src["seed"].get<std::uint64_t>();
        }
        if (src.contains("l0")) s.spec.l0 = get_int(src["l0"], "q_source.l0");
        if (src.contains("m_scale")) s.spec.m_scale = get_double(src["m_scale"], "q_source.m_scale");
        try {
            validate_fixture_spec(s.spec);
        } catch (const Error& e) {
            throw Error(ErrorCode::ValidationError, std::string("q_source: ") + e.what());
        }
        Fixture f = generate_fixture(s.spec);
        if (!same_zero_cell(*f.base, *s.base)) {
            // Labels are part of the category identity; compare shapes and report which level differs.
            for (int k = 1; k <= s.depth; ++k)
                if (f.base->gamma(k).mult() != s.gammas[static_cast<std::size_t>(k - 1)])
                    throw Error(ErrorCode::ValidationError, "Γ_" + std::to_string(k) + " differs from the generated " + s.spec.kind + " tower");
            for (int k = 0; k <= s.depth; ++k)
                if (f.base->cats[static_cast<std::size_t>(k)]->simples != s.labels[static_cast<std::size_t>(k)])
                    throw Error(ErrorCode::ValidationError, "labels of M_" + std::to_string(k) + " differ from the generated tower");
        }
        s.base = f.base;
        s.q = f.q;
        s.q.name = s.name;
    } else if (s.source == "explicit") {
        s.q = explicit_qsystem(s, src);
    } else {
        throw Error(ErrorCode::ValidationError, "q_source.kind must be 'generated' or 'explicit'");
    }
    return s;
}

Scenario scenario_parse(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return scenario_from_text(os.str());
}

std::string scenario_to_text(const Scenario& s, bool explicit_form) { return scenario_json(s, explicit_form).dump(2) + "\n"; }

Scenario scenario_generate(const FixtureSpec& spec) {
    validate_fixture_spec(spec);
    Fixture f = generate_fixture(spec);
    Scenario s;
    s.name = spec.name();
    s.depth = spec.depth;
    s.source = "generated";
    s.spec = spec;
    for (int k = 0; k <= spec.depth; ++k) s.labels.push_back(f.base->cats[static_cast<std::size_t>(k)]->simples);
    for (int k = 1; k <= spec.depth; ++k) s.gammas.push_back(f.base->gamma(k).mult());
    s.base = f.base;
    s.q = f.q;
    s.q.name = s.name;
    return s;
}

FixtureSpec fixture_spec_for(const std::string& kind_in, std::uint64_t seed, int depth, int n, int l0) {
    FixtureSpec spec;
    spec.seed = seed;
    // "amp(2)" and "amp2" name the same fixture.
    std::string kind_ = kind_in;
    std::erase(kind_, '(');
    std::erase(kind_, ')');
    const std::string& kind = kind_;
    std::string k = kind;
    if (kind == "amp2" || kind == "amp3") {
        k = "amp";
        spec.n = kind == "amp2" ? 2 : 3;
    } else if (kind.rfind("forced_l", 0) == 0 && kind.size() > 8) {
        k = "forced_l";
        try {
            spec.l0 = std::stoi(kind.substr(8));
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParameterOutOfRange, "unknown fixture kind '" + kind + "'");
        }
    }
    spec.kind = k;
    if (k == "fib" || k == "forced_l") spec.n = 2;
    if (n >= 0) spec.n = n;
    if (l0 >= 0) spec.l0 = l0;
    // Default depths: 4 where the split is exercised over several stable levels, 3 for amp(3).
    spec.depth = depth > 0 ? depth : ((k == "amp" && spec.n == 3) || k == "trivial" ? 3 : 4);
    validate_fixture_spec(spec);
    return spec;
}

TolerancePolicy resolve_tolerance(const Scenario& s, std::optional<double> flag) {
    TolerancePolicy tol = s.tol.value_or(TolerancePolicy{});
    if (const char* env = std::getenv("QSPLIT_TOL"); env && *env) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0') throw Error(ErrorCode::ParseError, std::string("QSPLIT_TOL is not a number: ") + env);
        tol.eps_num = v;
    }
    if (flag) tol.eps_num = *flag;
    try {
        tol.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ValidationError, std::string("tolerance: ") + e.what());
    }
    return tol;
}

// ------------------------------------------------------------------ commands

CommandResult cmd_check(const Scenario& s, const TolerancePolicy& tol, int jobs) {
    const QSystem& q = s.q;
    const int K = q.depth();
    json rep;
    rep["scenario"] = s.name;
    rep["depth"] = K;
    rep["tolerances"] = tol_json(tol);

    int l = -1;
    StabilityReport st;
    try {
        st = stability_level(q, tol);
        l = st.l;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NeverStable) throw;
        // Rebuild the per-level table without a stability level.
        for (int k = std::max(q.m.start, q.i.start); k <= K; ++k) {
            const AxiomResiduals a = axioms_check(q, k);
            st.report.add(k, "associativity", a.associativity, tol.eps_num);
            st.report.add(k, "unitality", a.unitality, tol.eps_num);
            st.report.add(k, "frobenius", a.frobenius, tol.eps_num);
            st.report.add(k, "separability", a.separability, tol.eps_num);
            if (k < K) {
                st.report.add(k, "exchange_m", exchange_residual(q.m.at(k), q.m.at(k + 1), *q.qq, *q.q, k), tol.eps_num);
                st.report.add(k, "exchange_i", exchange_residual(q.i.at(k), q.i.at(k + 1), *q.one, *q.q, k), tol.eps_num);
            }
        }
        st.report.finalize();
    }
    const CheckReport oc = one_cell_check(*q.q, tol);

    // Functional calculus per level; independent, so optionally in parallel.
    auto dq_level = [&](int k) -> json {
        json d;
        try {
            const DqData dq = dq_calculus(q, k, tol);
            d["d_Q"] = dq.d;
            d["norm"] = dq.norm;
            d["support"] = dq.nondegenerate ? "non-degenerate" : "degenerate support";
            d["residuals"] = json{{"dq_inverse", dq.inverse_residual}, {"dq_projection", dq.projection_residual},
                                  {"f2_lower", dq.f2_lower},          {"f2_upper", dq.f2_upper},
                                  {"f3b", dq.f3b}};
            if (!dq.warnings.empty()) d["warnings"] = dq.warnings;
        } catch (const Error& e) {
            d["error"] = e.what();
        }
        return d;
    };
    std::vector<json> dqs(static_cast<std::size_t>(K + 1));
    if (jobs > 1) {
        std::vector<std::future<json>> fut;
        for (int k = 0; k <= K; ++k) fut.push_back(std::async(std::launch::async, dq_level, k));
        for (int k = 0; k <= K; ++k) dqs[static_cast<std::size_t>(k)] = fut[static_cast<std::size_t>(k)].get();
    } else {
        for (int k = 0; k <= K; ++k) dqs[static_cast<std::size_t>(k)] = dq_level(k);
    }

    bool pass = l >= 0;
    json levels = json::array(), failing = json::array();
    for (int k = 0; k <= K; ++k) {
        json lv;
        lv["k"] = k;
        json res = json::object();
        for (const auto& r : st.report.levels)
            if (r.k == k) res.update(json(r.residuals));
        for (const auto& r : oc.levels)
            if (r.k == k)
                for (const auto& [name, v] : r.residuals) res["connection_" + name] = v;
        const json& d = dqs[static_cast<std::size_t>(k)];
        if (d.contains("residuals")) res.update(d["residuals"]);
        bool ok = !d.contains("error");
        for (const auto& [name, v] : res.items())
            if (!(v.get<double>() <= tol.eps_num)) ok = false;
        lv["residuals"] = res;
        for (const char* key : {"d_Q", "norm", "support", "warnings", "error"})
            if (d.contains(key)) lv[key] = d[key];
        lv["stable"] = l >= 0 && k >= l;
        lv["pass"] = ok;
        if (!ok) failing.push_back(k);
        if (!ok && (l < 0 || k >= l)) pass = false;
        levels.push_back(lv);
    }
    if (!oc.pass) pass = false;
    rep["stability_level"] = l >= 0 ? json(l) : json(nullptr);
    rep["levels"] = levels;
    rep["failing_levels"] = failing;
    rep["pass"] = pass;
    return CommandResult{pass ? 0 : 1, rep.dump(2) + "\n"};
}

std::string certificate_json(const SplitResult& r, const TolerancePolicy& tol) {
    json c;
    c["fixture"] = r.name;
    c["l"] = r.l;
    c["depth"] = r.depth;
    json levels = json::array();
    for (const auto& lv : r.certificate.levels) levels.push_back(json{{"k", lv.k}, {"residuals", lv.residuals}, {"pass", lv.pass}});
    c["levels"] = levels;
    json conns = json::array();
    for (const auto& w : r.connections)
        conns.push_back(json{{"k", w.k}, {"range", w.range}, {"agreement", w.agreement}, {"unitarity", w.unitarity}});
    c["connections"] = conns;
    c["witness"] = r.certificate.witness;
    c["pass"] = r.certificate.pass;
    c["tolerances"] = tol_json(tol);
    return c.dump(2) + "\n";
}

CommandResult cmd_split(const Scenario& s, const TolerancePolicy& tol, int depth, int jobs) {
    SplitOptions opt;
    opt.tol = tol;
    opt.depth = depth;
    opt.jobs = jobs;
    try {
        const SplitResult r = split_qsystem(s.q, opt);
        return CommandResult{r.certificate.pass ? 0 : 1, certificate_json(r, tol)};
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParameterOutOfRange) throw;
        json c{{"fixture", s.name}, {"pass", false}, {"error", e.what()}, {"tolerances", tol_json(tol)}};
        return CommandResult{1, c.dump(2) + "\n"};
    }
}

}  // namespace qsplit
