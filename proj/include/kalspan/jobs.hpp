#pragma once

// Verb dispatch for the batch front door. A job is a verb plus a payload document; budgets
// ride inside the payload under "budget" and are echoed back in every report.

#include <algorithm>
#include <atomic>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kalspan/serialize.hpp"

namespace kalspan {

enum class ExitCode : int { Decided = 0, InputFailure = 1, Undecided = 2 };

struct Job {
    std::string verb;
    Json payload;
};

struct Report {
    Json doc;
    ExitCode exit = ExitCode::Decided;
};

inline const std::vector<std::string>& verbs() {
    static const std::vector<std::string> v{"approx", "relation", "certify", "integerize",
                                            "kalton", "theorem-scan", "verify"};
    return v;
}

struct JobBudget {
    KroneckerBudget kronecker;
    std::uint64_t maxMultiplier = 1'000'000;
    std::uint64_t enumerationPoints = 200'000;
    unsigned threads = 4;  // theorem-scan workers; output order does not depend on it

    IntegerizeBudget integerize() const { return {maxMultiplier, kronecker}; }
};

namespace jobs {

using codec::child;
using codec::field;

inline JobBudget parseBudget(const Json& payload) {
    JobBudget b;
    if (!payload.contains("budget")) return b;
    const Json& j = payload["budget"];
    if (!j.is_object()) throw InputError("/budget", "expected an object");
    auto count = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = static_cast<std::remove_reference_t<decltype(slot)>>(
                                 codec::parseCount(j[key], std::string("/budget/") + key));
    };
    count("scanLimit", b.kronecker.scanLimit);
    count("refineBits", b.kronecker.refineBits);
    count("deltaSteps", b.kronecker.deltaSteps);
    count("snapDenominators", b.kronecker.snapDenominators);
    count("maxMultiplier", b.maxMultiplier);
    count("enumerationPoints", b.enumerationPoints);
    count("threads", b.threads);
    if (b.kronecker.refineBits == 0 || b.kronecker.refineBits > kDefaultMaxLevel) {
        throw InputError("/budget/refineBits", "must lie in [1, " + std::to_string(kDefaultMaxLevel) + "]");
    }
    if (b.threads == 0) b.threads = 1;
    return b;
}

inline Json budgetJson(const JobBudget& b) {
    return Json{{"scanLimit", b.kronecker.scanLimit},
                {"refineBits", b.kronecker.refineBits},
                {"deltaSteps", b.kronecker.deltaSteps},
                {"snapDenominators", b.kronecker.snapDenominators},
                {"maxMultiplier", b.maxMultiplier},
                {"enumerationPoints", b.enumerationPoints}};
}

inline std::string optionalString(const Json& p, const char* key, const std::string& fallback) {
    if (!p.contains(key)) return fallback;
    if (!p[key].is_string()) throw InputError(std::string("/") + key, "expected a string");
    return p[key].get<std::string>();
}

inline Json approx(const Json& p, const JobBudget& b) {
    const Rational eps = codec::parseRationalJ(field(p, "eps", ""), "/eps");
    const std::string method = optionalString(p, "method", "dirichlet");
    if (method == "sequence") {
        const Json& raw = codec::array(field(p, "samples", ""), "/samples");
        std::vector<std::vector<Scalar>> samples;
        for (std::size_t i = 0; i < raw.size(); ++i) samples.push_back(codec::parseScalars(raw[i], child("/samples", i)));
        const std::size_t quorum = codec::parseCount(field(p, "quorum", ""), "/quorum");
        return toJson(sequenceMultiplier(samples, eps, quorum, b.kronecker));
    }
    const std::vector<Scalar> t = codec::parseScalars(field(p, "t", ""), "/t");
    if (method == "dirichlet") return toJson(dirichletMultiplier(t, eps, b.kronecker));
    if (method == "lll") {
        const Integer mMax = p.contains("mMax") ? codec::parseInteger(p["mMax"], "/mMax")
                                                : detail::dirichletBound(eps, t.size());
        const auto cert = lllMultiplier(t, eps, mMax, b.kronecker);
        if (!cert) throw BudgetExceeded("lattice reduction found no multiplier");
        return toJson(*cert);
    }
    if (method == "compact") {
        TorusPoint pt;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!t[i].isRational()) throw InputError(child("/t", i), "compact method needs rational coordinates");
            pt.coords.push_back(t[i]);
        }
        return toJson(compactMultiplier(pt, eps, b.kronecker));
    }
    throw InputError("/method", "expected dirichlet, lll, compact or sequence");
}

inline Report relation(const Json& p, const JobBudget& b) {
    const std::vector<Scalar> v = codec::parseScalars(field(p, "v", ""), "/v");
    const Rational eps = codec::parseRationalJ(field(p, "eps", ""), "/eps");
    const Integer height = codec::parseInteger(field(p, "height", ""), "/height");
    const RelationSearch r = integerRelation(v, eps, height, RelationBudget{b.enumerationPoints});
    if (r.cert) return {toJson(*r.cert), ExitCode::Decided};
    Json j = codec::header("relation-search");
    j["v"] = codec::scalars(v);
    j["eps"] = codec::rational(eps);
    j["height"] = codec::integer(height);
    j["found"] = false;
    j["exhaustive"] = r.exhaustive;
    return {j, r.exhaustive ? ExitCode::Decided : ExitCode::Undecided};
}

/// Query neighbourhoods for certify: explicit, or one over the core and the first tail slots.
inline std::vector<BasicNbhd> queries(const Json& p, const Family& f, const AmbientSpace& s) {
    std::vector<BasicNbhd> out;
    if (p.contains("queries")) {
        const Json& q = codec::array(p["queries"], "/queries");
        for (std::size_t i = 0; i < q.size(); ++i) out.push_back(codec::parseNbhd(q[i], child("/queries", i)));
        for (std::size_t i = 0; i < out.size(); ++i) {
            for (Coord c : out[i].coords) {
                if (s.isEuclidean() && c >= s.dim) throw InputError(child("/queries", i), "coordinate outside the space");
            }
        }
        return out;
    }
    CoordSet coords = f.coreCoords();
    if (f.tail) {
        coords.insert(f.tail->freshCoord(0));
        coords.insert(f.tail->freshCoord(1));
    }
    if (coords.empty()) coords.insert(0);
    out.emplace_back(coords, Rational(1, 10));
    return out;
}

inline Json certify(const Json& p, const JobBudget& b) {
    const Family f = codec::parseFamily(field(p, "family", ""), "/family");
    const AmbientSpace s = codec::parseSpace(field(p, "space", ""), "/space");
    const std::vector<BasicNbhd> qs = queries(p, f, s);
    Json certs = Json::array();
    Json j = codec::header("certify");
    j["family"] = codec::family(f);
    j["space"] = codec::space(s);
    j["budget"] = budgetJson(b);
    Json qj = Json::array();
    for (const auto& q : qs) qj.push_back(codec::nbhd(q));
    j["queries"] = qj;

    const InstanceReport verdicts = checkTheoremInstance(f, s);
    j["summable"] = toString(verdicts.summable);
    j["independent"] = toString(verdicts.independent);
    j["semiBasic"] = toString(verdicts.semiBasic);
    j["violation"] = verdicts.violation;
    if (verdicts.semiBasic == Verdict::Inconclusive) throw Undecided("family has non-exact scalars");

    const SummabilityResult acs = isAbsolutelyCauchySummable(f, s);
    if (acs.summable) {
        for (const auto& v : qs) certs.push_back(summabilitySetJson(f, v, summabilitySet(f, s, v)));
    } else {
        certs.push_back(summabilityCounterexampleJson(f, *acs.counterexample));
    }

    const IndependenceResult ti = isTopologicallyIndependent(f, s);
    if (ti.independent) {
        for (const auto& w : qs) certs.push_back(toJson(ti.schema->witness(w), w));
    } else {
        j["defeatKind"] = toString(ti.defeat->kind);
        j["defeatMember"] = ti.defeat->a;
        if (ti.defeat->kind != DefeatGenerator::Kind::ZeroMember) {
            for (const auto& u : qs) certs.push_back(toJson(ti.defeat->defeat(u, b.integerize())));
        }
    }

    const SemiBasicResult sb = isSemiBasic(f, s);
    if (sb.semiBasic) {
        for (const auto& c : sb.certs) certs.push_back(toJson(c));
    } else {
        j["offending"] = *sb.offending;
    }
    j["certificates"] = certs;
    return j;
}

inline Json integerizeJob(const Json& p, const JobBudget& b) {
    const SparseVector a = codec::parseVector(field(p, "a", ""), "/a");
    const Family fam = codec::parseFamily(field(p, "B", ""), "/B");
    const BasicNbhd u = codec::parseNbhd(field(p, "U", ""), "/U");
    BasicNbhd w;
    if (p.contains("W")) {
        w = codec::parseNbhd(p["W"], "/W");
    } else {
        if (a.isZero()) throw InputError("/a", "the zero vector is inside every W");
        w = defaultTarget(a);
    }
    WitnessDefeater d = integerize(a, fam, u, w, b.integerize());
    Json j = toJson(d);
    j["B"] = codec::family(fam);
    return j;
}

inline Json kalton(const Json& p) {
    const Family f = codec::parseFamily(field(p, "family", ""), "/family");
    const AmbientSpace s = codec::parseSpace(field(p, "space", ""), "/space");
    const EmbeddingReport r = embeddingReport(f, s);
    Json j = codec::header("embedding");
    j["family"] = codec::family(f);
    j["space"] = codec::space(s);
    j["continuous"] = toString(r.continuous);
    j["injective"] = toString(r.injective);
    j["openOntoImage"] = toString(r.openOntoImage);
    j["linOpenInjection"] = toString(r.linOpenInjection);
    j["kalEmbedding"] = toString(r.kalEmbedding);
    j["lkalEmbedding"] = toString(r.lkalEmbedding);
    if (r.relation) j["relation"] = codec::integers(*r.relation);
    if (r.counterexample) j["counterexample"] = codec::nbhd(*r.counterexample);

    Json certs = Json::array();
    if (r.continuous == Verdict::Yes) {
        for (const auto& step : isKaltonContinuous(f, s).schedule) certs.push_back(continuityStepJson(f, step));
    } else {
        certs.push_back(summabilityCounterexampleJson(f, *r.counterexample));
    }
    if (r.relation) certs.push_back(memberRelationJson(f.members, *r.relation));
    if (r.linOpenInjection == Verdict::Yes) {
        for (const auto& bound : isLinKaltonOpenInjection(f, s).bounds) certs.push_back(coordinateBoundJson(f, bound));
    }
    j["certificates"] = certs;
    return j;
}

inline Json instanceJson(const InstanceReport& r) {
    Json j{{"label", r.label},
           {"summable", toString(r.summable)},
           {"independent", toString(r.independent)},
           {"semiBasic", toString(r.semiBasic)},
           {"violation", r.violation}};
    if (r.offending) j["offending"] = *r.offending;
    return j;
}

/// Per-instance work is spread over worker threads; results land in seed order.
inline Json theoremScan(const Json& p, const JobBudget& b) {
    const std::uint64_t seed = codec::parseCount(field(p, "seed", ""), "/seed");
    const std::uint64_t count = codec::parseCount(field(p, "count", ""), "/count");
    std::vector<InstanceReport> reports(count);
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t i = next++; i < count; i = next++) {
            const Profile prof = sweepProfile(seed, i);
            const Instance inst = generateInstance(seed + i, prof);
            reports[i] = checkTheoremInstance(inst.family, inst.space,
                                              std::string(toString(prof.kind)) + "#" + std::to_string(seed + i));
        }
    };
    std::vector<std::thread> pool;
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(b.threads, std::max<std::uint64_t>(count, 1)));
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    Json j = codec::header("theorem-scan");
    j["seed"] = seed;
    j["count"] = count;
    Json items = Json::array();
    std::size_t violations = 0, inconclusive = 0;
    for (const auto& r : reports) {
        if (r.violation) ++violations;
        if (r.semiBasic == Verdict::Inconclusive) ++inconclusive;
        items.push_back(instanceJson(r));
    }
    j["instances"] = items;
    j["violations"] = violations;
    j["inconclusive"] = inconclusive;
    return j;
}

inline Json verify(const Json& p) {
    Json j = codec::header("verification");
    const Json& doc = p.contains("certificate") ? p["certificate"] : p;
    j["of"] = field(doc, "kind", "").get<std::string>();
    j["valid"] = verifyDocument(doc);
    return j;
}

inline Json errorDoc(const char* status, const std::string& verb, const std::string& message) {
    Json j = codec::header("error");
    j["status"] = status;
    j["verb"] = verb;
    j["message"] = message;
    return j;
}

}  // namespace jobs

/// Runs one job. Never throws: failures become an error report with the matching exit code.
inline Report runJob(const Job& job) {
    try {
        if (std::find(verbs().begin(), verbs().end(), job.verb) == verbs().end()) {
            throw InputError("verb", "unknown verb \"" + job.verb + "\"");
        }
        if (!job.payload.is_object()) throw InputError("", "payload must be a JSON object");
        const JobBudget b = jobs::parseBudget(job.payload);
        const Json& p = job.payload;
        if (job.verb == "approx") return {jobs::approx(p, b), ExitCode::Decided};
        if (job.verb == "relation") return jobs::relation(p, b);
        if (job.verb == "certify") return {jobs::certify(p, b), ExitCode::Decided};
        if (job.verb == "integerize") return {jobs::integerizeJob(p, b), ExitCode::Decided};
        if (job.verb == "kalton") return {jobs::kalton(p), ExitCode::Decided};
        if (job.verb == "theorem-scan") return {jobs::theoremScan(p, b), ExitCode::Decided};
        return {jobs::verify(p), ExitCode::Decided};
    } catch (const InputError& e) {
        return {jobs::errorDoc("input-error", job.verb, e.what()), ExitCode::InputFailure};
    } catch (const nlohmann::json::exception& e) {
        return {jobs::errorDoc("input-error", job.verb, e.what()), ExitCode::InputFailure};
    } catch (const PreconditionViolation& e) {
        return {jobs::errorDoc("precondition", job.verb, e.what()), ExitCode::InputFailure};
    } catch (const NotInClosure& e) {
        return {jobs::errorDoc("not-in-closure", job.verb, e.what()), ExitCode::InputFailure};
    } catch (const NotRepresentable& e) {
        return {jobs::errorDoc("not-representable", job.verb, e.what()), ExitCode::InputFailure};
    } catch (const RadicandMismatch& e) {
        return {jobs::errorDoc("input-error", job.verb, e.what()), ExitCode::InputFailure};
    } catch (const IndexOutOfFamily& e) {
        return {jobs::errorDoc("input-error", job.verb, e.what()), ExitCode::InputFailure};
    } catch (const Undecided& e) {
        return {jobs::errorDoc("undecided", job.verb, e.what()), ExitCode::Undecided};
    } catch (const BudgetExceeded& e) {
        return {jobs::errorDoc("budget-exceeded", job.verb, e.what()), ExitCode::Undecided};
    } catch (const InsufficientQuorum& e) {
        return {jobs::errorDoc("insufficient-quorum", job.verb, e.what()), ExitCode::Undecided};
    } catch (const Error& e) {
        return {jobs::errorDoc("undecided", job.verb, e.what()), ExitCode::Undecided};
    }
}

/// Parses job text; syntax errors carry the byte offset.
inline Report runJobText(const std::string& verb, const std::string& text) {
    Json payload;
    try {
        payload = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        return {jobs::errorDoc("input-error", verb, "byte " + std::to_string(e.byte) + ": malformed JSON"),
                ExitCode::InputFailure};
    }
    return runJob({verb, payload});
}

enum class Format { Json, Table };

namespace detail {

inline std::string cell(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) return "[" + std::to_string(v.size()) + " items]";
    if (v.is_object()) return "{" + std::to_string(v.size()) + " fields}";
    return v.dump();
}

}  // namespace detail

/// json: sorted keys, no whitespace, one trailing newline. table: "key  value" rows; an
/// embedding report shows only its continuity and the two embedding verdicts.
inline std::string formatReport(const Json& doc, Format mode) {
    if (mode == Format::Json) return doc.dump() + "\n";
    std::vector<std::pair<std::string, std::string>> rows;
    if (doc.is_object() && doc.value("kind", "") == "embedding") {
        rows = {{"lkal_A continuous", detail::cell(doc["continuous"])},
                {"kal_A embedding", detail::cell(doc["kalEmbedding"])},
                {"lkal_A embedding", detail::cell(doc["lkalEmbedding"])}};
    } else {
        for (auto it = doc.begin(); it != doc.end(); ++it) rows.emplace_back(it.key(), detail::cell(it.value()));
    }
    std::size_t width = 0;
    for (const auto& [k, v] : rows) width = std::max(width, k.size());
    std::ostringstream out;
    for (const auto& [k, v] : rows) out << k << std::string(width + 2 - k.size(), ' ') << v << "\n";
    return out.str();
}

}  // namespace kalspan
