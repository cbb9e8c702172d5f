#include "discop.h"

#include <cstring>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include "discop/conformance.hpp"
#include "discop/coupling.hpp"
#include "discop/copula.hpp"
#include "discop/joint.hpp"
#include "discop/json_io.hpp"
#include "discop/marginal.hpp"
#include "discop/table.hpp"

// Opaque handle definitions. Each wraps one core object; ownership stays with
// the caller through the matching *_free function.
struct discop_profile {
    discop::Profile value;
};
struct discop_copula {
    discop::Copula value;
};
struct discop_joint {
    discop::JointPmf value;
};
struct discop_model {
    std::unique_ptr<discop::ModelOracle> value;
};
struct discop_report {
    discop::ConformanceReport value;
};
struct discop_grid {
    discop::CopulaGrid value;
};

namespace {

thread_local std::string t_last_error;

discop_status set_error(discop_status code, const char* what) {
    t_last_error = what ? what : "";
    return code;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
discop_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return DISCOP_OK;
    } catch (const discop::OracleError& e) {
        return set_error(DISCOP_ERR_ORACLE, e.what());
    } catch (const std::domain_error& e) {
        return set_error(DISCOP_ERR_UNSUPPORTED, e.what());
    } catch (const std::invalid_argument& e) {
        return set_error(DISCOP_ERR_INVALID, e.what());
    } catch (const std::bad_alloc&) {
        return set_error(DISCOP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(DISCOP_ERR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

discop_status run_check(discop_report** out, const discop_model* m, double tol,
                        discop::ConformanceReport (*fn)(const discop::ModelOracle&, double,
                                                        const void*),
                        const void* args) {
    if (!out || !m) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        const double use_tol = tol > 0 ? tol : m->value->default_tolerance();
        *out = new discop_report{fn(*m->value, use_tol, args)};
    });
}

} // namespace

extern "C" {

const char* discop_version(void) { return "0.1.0"; }

const char* discop_last_error(void) { return t_last_error.c_str(); }

void discop_string_free(char* s) { delete[] s; }

/* ---- profiles ---- */

discop_status discop_profile_parse(const char* json, discop_profile** out) {
    if (!json || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    const std::string text = json;
    const discop_status st = guarded([&] { *out = new discop_profile{discop::parse_profile(text)}; });
    if (st == DISCOP_ERR_INVALID) return set_error(DISCOP_ERR_PARSE, discop_last_error());
    return st;
}

discop_status discop_profile_to_json(const discop_profile* p, char** out) {
    if (!p || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] { *out = dup_string(discop::profile_to_json(p->value)); });
}

int discop_profile_dims(const discop_profile* p) { return p ? p->value.dims() : 0; }

discop_status discop_profile_collapse(const discop_profile* p, int dim, int bin,
                                      discop_profile** out) {
    if (!p || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new discop_profile{p->value.collapsed(dim, bin)}; });
}

void discop_profile_free(discop_profile* p) { delete p; }

/* ---- copulas ---- */

discop_status discop_copula_parse(const char* json_or_name, int fallback_dim, discop_copula** out) {
    if (!json_or_name || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    const std::string text = json_or_name;
    const discop_status st =
        guarded([&] { *out = new discop_copula{discop::parse_copula_spec(text, fallback_dim)}; });
    if (st == DISCOP_ERR_INVALID && !text.empty() && text[0] == '{')
        return set_error(DISCOP_ERR_PARSE, discop_last_error());
    return st;
}

discop_status discop_copula_custom(int dim, discop_copula_fn fn, void* ctx, discop_copula** out) {
    if (!fn || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto wrapper = [fn, ctx, dim](std::span<const double> x) {
            return fn(x.data(), dim, ctx);
        };
        *out = new discop_copula{discop::Copula::custom(dim, wrapper, "custom")};
    });
}

int discop_copula_dim(const discop_copula* c) { return c ? c->value.dim() : 0; }

discop_status discop_copula_evaluate(const discop_copula* c, const double* x, int n, double* out) {
    if (!c || !x || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] { *out = c->value.value(std::span<const double>(x, static_cast<std::size_t>(n))); });
}

discop_status discop_copula_rectangle(const discop_copula* c, const double* lower,
                                      const double* upper, int n, double* out) {
    if (!c || !lower || !upper || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] {
        *out = c->value.rectangle_probability(std::span<const double>(lower, static_cast<std::size_t>(n)),
                                              std::span<const double>(upper, static_cast<std::size_t>(n)));
    });
}

discop_status discop_copula_check_axioms(const discop_copula* c, int grid_depth, int* pass_out,
                                         char** json_out) {
    if (!c) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] {
        const discop::AxiomsReport rep = c->value.check_axioms(grid_depth);
        if (pass_out) *pass_out = rep.pass() ? 1 : 0;
        if (json_out) *json_out = dup_string(discop::axioms_to_json(rep));
    });
}

void discop_copula_free(discop_copula* c) { delete c; }

/* ---- joints ---- */

discop_status discop_joint_build(const discop_copula* c, const discop_profile* p,
                                 discop_joint** out) {
    if (!c || !p || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new discop_joint{discop::build_joint(c->value, p->value)}; });
}

discop_status discop_joint_maximal_coupling(const discop_profile* p, discop_joint** out) {
    if (!p || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        if (p->value.dims() != 2)
            throw std::invalid_argument("maximal coupling requires exactly 2 marginals");
        *out = new discop_joint{discop::maximal_coupling(p->value.at(1), p->value.at(2))};
    });
}

int discop_joint_dims(const discop_joint* j) { return j ? j->value.dims() : 0; }

discop_status discop_joint_cdf(const discop_joint* j, const int* s, int n, double* out) {
    if (!j || !s || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] { *out = j->value.cdf(std::span<const int>(s, static_cast<std::size_t>(n))); });
}

discop_status discop_joint_marginal(const discop_joint* j, int dim, char** json_out) {
    if (!j || !json_out) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] { *json_out = dup_string(discop::marginal_to_json(j->value.marginal_of(dim))); });
}

discop_status discop_joint_to_json(const discop_joint* j, char** out) {
    if (!j || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] { *out = dup_string(discop::joint_to_json(j->value)); });
}

discop_status discop_joint_render_table(const discop_joint* j, char** out) {
    if (!j || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] { *out = dup_string(discop::render_table(j->value)); });
}

void discop_joint_free(discop_joint* j) { delete j; }

/* ---- models ---- */

discop_status discop_model_create(const char* spec, discop_model** out) {
    if (!spec || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    const std::string text = spec;
    return guarded([&] { *out = new discop_model{discop::make_model(text)}; });
}

discop_status discop_model_from_copula(const discop_copula* c, discop_model** out) {
    if (!c || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new discop_model{std::make_unique<discop::CopulaModel>(c->value)}; });
}

discop_status discop_model_query(const discop_model* m, const discop_profile* p,
                                 discop_joint** out) {
    if (!m || !p || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new discop_joint{m->value->raw_query(p->value)}; });
}

double discop_model_default_tol(const discop_model* m) {
    return m ? m->value->default_tolerance() : 0.0;
}

void discop_model_free(discop_model* m) { delete m; }

/* ---- conformance ---- */

discop_status discop_check_ia_at(const discop_model* m, const discop_profile* p, int dim, int bin,
                                 double tol, discop_report** out) {
    if (!m || !p || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        const double use_tol = tol > 0 ? tol : m->value->default_tolerance();
        *out = new discop_report{discop::check_ia_at(*m->value, p->value, dim, bin, use_tol)};
    });
}

discop_status discop_check_ia_randomized(const discop_model* m, long trials, uint64_t seed,
                                         int dims, int zmax, double tol, discop_report** out) {
    if (!m || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        const double use_tol = tol > 0 ? tol : m->value->default_tolerance();
        *out = new discop_report{
            discop::check_ia_randomized(*m->value, trials, seed, dims, zmax, use_tol)};
    });
}

discop_status discop_extract_copula(const discop_model* m, const double* x, int n, double* out) {
    if (!m || !x || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] {
        *out = discop::extract_copula(*m->value, std::span<const double>(x, static_cast<std::size_t>(n)));
    });
}

discop_status discop_extract_grid(const discop_model* m, int dims, int grid_depth,
                                  discop_grid** out) {
    if (!m || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new discop_grid{discop::CopulaGrid::extract(*m->value, dims, grid_depth)};
    });
}

discop_status discop_grid_to_json(const discop_grid* g, char** out) {
    if (!g || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] { *out = dup_string(discop::copula_grid_to_json(g->value)); });
}

discop_status discop_grid_value(const discop_grid* g, const double* x, int n, double* out) {
    if (!g || !x || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] {
        *out = g->value.value(std::span<const double>(x, static_cast<std::size_t>(n)));
    });
}

void discop_grid_free(discop_grid* g) { delete g; }

discop_status discop_verify_extraction_spec(const discop_model* m, const discop_copula* hypothesis,
                                            long trials, uint64_t seed, int zmax, double tol,
                                            discop_report** out) {
    if (!m || !hypothesis || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        const double use_tol = tol > 0 ? tol : m->value->default_tolerance();
        *out = new discop_report{discop::verify_extraction_consistency(
            *m->value, hypothesis->value, trials, seed, zmax, use_tol)};
    });
}

discop_status discop_verify_extraction_grid(const discop_model* m, const discop_grid* hypothesis,
                                            long trials, uint64_t seed, int zmax, double tol,
                                            discop_report** out) {
    if (!m || !hypothesis || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        const double use_tol = tol > 0 ? tol : m->value->default_tolerance();
        *out = new discop_report{discop::verify_extraction_consistency(
            *m->value, hypothesis->value, trials, seed, zmax, use_tol)};
    });
}

discop_status discop_check_m_neutrality_at(const discop_model* m, const discop_profile* p, int dim,
                                           const int* sigma, int len, double tol,
                                           discop_report** out) {
    if (!m || !p || !sigma || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        const double use_tol = tol > 0 ? tol : m->value->default_tolerance();
        const discop::Permutation perm(std::vector<int>(sigma, sigma + len));
        *out = new discop_report{
            discop::check_m_neutrality(*m->value, p->value, dim, perm, use_tol)};
    });
}

discop_status discop_check_m_neutrality_randomized(const discop_model* m, long trials,
                                                   uint64_t seed, int dims, int zmax, double tol,
                                                   discop_report** out) {
    if (!m || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        const double use_tol = tol > 0 ? tol : m->value->default_tolerance();
        *out = new discop_report{
            discop::check_m_neutrality_randomized(*m->value, trials, seed, dims, zmax, use_tol)};
    });
}

discop_status discop_verify_factorization(const discop_copula* c, const int* m_dims, int m_len,
                                          int grid_depth, double tol, discop_report** out) {
    if (!c || (!m_dims && m_len > 0) || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        const double use_tol = tol > 0 ? tol : c->value.default_tolerance();
        *out = new discop_report{discop::verify_factorization(
            c->value, std::span<const int>(m_dims, static_cast<std::size_t>(m_len)), grid_depth,
            use_tol)};
    });
}

/* ---- reports ---- */

const char* discop_report_verdict(const discop_report* r) {
    static thread_local std::string verdict;
    if (!r) return "";
    verdict = discop::verdict_name(r->value.verdict);
    return verdict.c_str();
}

double discop_report_worst(const discop_report* r) { return r ? r->value.worst_violation : 0.0; }

long discop_report_trials(const discop_report* r) { return r ? r->value.trials : 0; }

discop_status discop_report_to_json(const discop_report* r, char** out) {
    if (!r || !out) return set_error(DISCOP_ERR_INVALID, "null argument");
    return guarded([&] { *out = dup_string(discop::report_to_json(r->value)); });
}

void discop_report_free(discop_report* r) { delete r; }

} // extern "C"
