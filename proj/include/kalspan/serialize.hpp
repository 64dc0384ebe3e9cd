#pragma once

// JSON encodings shared by the CLI and the verifier.
//   Scalar:  "p/q" | integer | {"a": "p/q", "b": "p/q", "rad": n} | {"const": "sqrt", "arg": n}
//   Vector:  {"entries": {"<coord>": Scalar, ...}}
//   Nbhd:    {"coords": [..], "radius": "p/q"}
//   Family:  {"members": [Vector, ...], "tail": {"base": Vector, "start": n, "c": "p/q", "rho": "p/q"}}
//   Space:   {"kind": "euclidean", "d": n} | {"kind": "product"}

#include <string>
#include <vector>

#include "json.hpp"
#include "kalspan/kalton.hpp"
#include "kalspan/kronecker.hpp"
#include "kalspan/lattice.hpp"
#include "kalspan/properties.hpp"

namespace kalspan {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace codec {

inline std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
inline std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw InputError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw InputError(child(path, key), "missing field");
    return *it;
}

inline const Json& array(const Json& j, const std::string& path) {
    if (!j.is_array()) throw InputError(path, "expected an array");
    return j;
}

// ---- numbers

inline Json integer(const Integer& z) {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
}

inline Integer parseInteger(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return Integer(std::to_string(j.get<long long>()));
    if (j.is_string()) {
        Integer z;
        if (z.set_str(j.get<std::string>(), 10) != 0) throw InputError(path, "malformed integer");
        return z;
    }
    throw InputError(path, "expected an integer");
}

inline std::uint64_t parseCount(const Json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw InputError(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

inline Json rational(const Rational& q) { return toString(q); }

inline Rational parseRationalJ(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return Rational(Integer(std::to_string(j.get<long long>())));
    if (!j.is_string()) throw InputError(path, "expected a rational \"p/q\"");
    try {
        return parseRational(j.get<std::string>());
    } catch (const InputError& e) {
        throw InputError(path, e.what());
    }
}

inline Json integers(const IntegerVector& z) {
    Json out = Json::array();
    for (const Integer& zi : z) out.push_back(integer(zi));
    return out;
}

inline IntegerVector parseIntegers(const Json& j, const std::string& path) {
    IntegerVector out;
    for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(parseInteger(j[i], child(path, i)));
    return out;
}

// ---- scalars and vectors

inline Json scalar(const Scalar& s) {
    if (s.isRational()) return rational(s.rational());
    if (s.isQuad()) {
        const QuadExt& q = s.quad();
        return Json{{"a", rational(q.a())}, {"b", rational(q.b())}, {"rad", q.radicand()}};
    }
    const auto& name = s.interval().name();
    if (!name || name->kind != "sqrt") throw NotRepresentable("only named interval constants serialize");
    return Json{{"const", "sqrt"}, {"arg", name->arg}};
}

inline Scalar parseScalar(const Json& j, const std::string& path) {
    if (j.is_string() || j.is_number_integer()) return Scalar(parseRationalJ(j, path));
    if (!j.is_object()) throw InputError(path, "expected a scalar");
    if (j.contains("const")) {
        if (field(j, "const", path) != "sqrt") throw InputError(child(path, "const"), "only \"sqrt\" is supported");
        const Json& arg = field(j, "arg", path);
        if (!arg.is_number_integer() || arg.get<long>() < 0) throw InputError(child(path, "arg"), "expected n >= 0");
        return Scalar(IntervalConst::sqrtOf(arg.get<long>()));
    }
    const Json& rad = field(j, "rad", path);
    if (!rad.is_number_integer()) throw InputError(child(path, "rad"), "expected an integer radicand");
    try {
        return Scalar(QuadExt(parseRationalJ(field(j, "a", path), child(path, "a")),
                              parseRationalJ(field(j, "b", path), child(path, "b")), rad.get<long>()));
    } catch (const PreconditionViolation& e) {
        throw InputError(child(path, "rad"), e.what());
    }
}

inline Json scalars(const std::vector<Scalar>& v) {
    Json out = Json::array();
    for (const Scalar& s : v) out.push_back(scalar(s));
    return out;
}

inline std::vector<Scalar> parseScalars(const Json& j, const std::string& path) {
    std::vector<Scalar> out;
    for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(parseScalar(j[i], child(path, i)));
    return out;
}

inline Json vector(const SparseVector& v) {
    Json entries = Json::object();
    for (const auto& [c, s] : v.entries()) entries[std::to_string(c)] = scalar(s);
    return Json{{"entries", entries}};
}

inline Coord parseCoord(const std::string& key, const std::string& path) {
    if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos) {
        throw InputError(path, "coordinate keys are non-negative integers");
    }
    return std::stoull(key);
}

inline SparseVector parseVector(const Json& j, const std::string& path) {
    const Json& entries = field(j, "entries", path);
    const std::string epath = child(path, "entries");
    if (!entries.is_object()) throw InputError(epath, "expected an object");
    SparseVector out;
    for (auto it = entries.begin(); it != entries.end(); ++it) {
        const std::string p = child(epath, it.key());
        out.set(parseCoord(it.key(), p), parseScalar(it.value(), p));
    }
    return out;
}

inline Json vectors(const std::vector<SparseVector>& vs) {
    Json out = Json::array();
    for (const auto& v : vs) out.push_back(vector(v));
    return out;
}

inline std::vector<SparseVector> parseVectors(const Json& j, const std::string& path) {
    std::vector<SparseVector> out;
    for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(parseVector(j[i], child(path, i)));
    return out;
}

inline Json coords(const CoordSet& cs) {
    Json out = Json::array();
    for (Coord c : cs) out.push_back(c);
    return out;
}

inline CoordSet parseCoords(const Json& j, const std::string& path) {
    CoordSet out;
    for (std::size_t i = 0; i < array(j, path).size(); ++i) out.insert(parseCount(j[i], child(path, i)));
    return out;
}

inline Json nbhd(const BasicNbhd& v) { return Json{{"coords", coords(v.coords)}, {"radius", rational(v.radius)}}; }

inline BasicNbhd parseNbhd(const Json& j, const std::string& path) {
    const Rational r = parseRationalJ(field(j, "radius", path), child(path, "radius"));
    if (r <= 0) throw InputError(child(path, "radius"), "radius must be positive");
    return {parseCoords(field(j, "coords", path), child(path, "coords")), r};
}

inline Json family(const Family& f) {
    Json out{{"members", vectors(f.members)}};
    if (f.tail) {
        out["tail"] = Json{{"base", vector(f.tail->base)},
                           {"start", f.tail->start},
                           {"c", rational(f.tail->c)},
                           {"rho", rational(f.tail->rho)}};
    }
    return out;
}

inline Family parseFamily(const Json& j, const std::string& path) {
    Family f;
    f.members = parseVectors(field(j, "members", path), child(path, "members"));
    if (j.contains("tail")) {
        const std::string tp = child(path, "tail");
        const Json& t = j["tail"];
        TailSpec spec;
        if (t.contains("base")) spec.base = parseVector(t["base"], child(tp, "base"));
        spec.start = parseCount(field(t, "start", tp), child(tp, "start"));
        spec.c = parseRationalJ(field(t, "c", tp), child(tp, "c"));
        spec.rho = parseRationalJ(field(t, "rho", tp), child(tp, "rho"));
        f.tail = spec;
    }
    try {
        f.validate();
    } catch (const PreconditionViolation& e) {
        throw InputError(path, e.what());
    }
    return f;
}

inline Json space(const AmbientSpace& s) {
    if (s.isEuclidean()) return Json{{"kind", "euclidean"}, {"d", s.dim}};
    return Json{{"kind", "product"}};
}

inline AmbientSpace parseSpace(const Json& j, const std::string& path) {
    const Json& kind = field(j, "kind", path);
    if (kind == "product") return AmbientSpace::product();
    if (kind != "euclidean") throw InputError(child(path, "kind"), "expected \"euclidean\" or \"product\"");
    const std::uint64_t d = parseCount(field(j, "d", path), child(path, "d"));
    if (d == 0) throw InputError(child(path, "d"), "dimension must be positive");
    return AmbientSpace::euclidean(d);
}

inline Json indices(const std::vector<std::size_t>& xs) {
    Json out = Json::array();
    for (std::size_t x : xs) out.push_back(x);
    return out;
}

inline std::vector<std::size_t> parseIndices(const Json& j, const std::string& path) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(parseCount(j[i], child(path, i)));
    return out;
}

inline Json functional(const std::map<Coord, Scalar>& y) {
    Json out = Json::object();
    for (const auto& [c, s] : y) out[std::to_string(c)] = scalar(s);
    return out;
}

inline std::map<Coord, Scalar> parseFunctional(const Json& j, const std::string& path) {
    if (!j.is_object()) throw InputError(path, "expected an object");
    std::map<Coord, Scalar> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string p = child(path, it.key());
        out.emplace(parseCoord(it.key(), p), parseScalar(it.value(), p));
    }
    return out;
}

inline Json matrix(const Matrix& m) {
    Json out = Json::array();
    for (const auto& row : m) out.push_back(scalars(row));
    return out;
}

inline Matrix parseMatrix(const Json& j, const std::string& path) {
    Matrix out;
    for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(parseScalars(j[i], child(path, i)));
    return out;
}

inline Json header(const char* kind) { return Json{{"kind", kind}, {"schemaVersion", kSchemaVersion}}; }

}  // namespace codec

// ---------------------------------------------------------------------------------------------
// certificates

inline Json toJson(const MultiplierCert& c) {
    Json j = codec::header("multiplier");
    j["t"] = codec::scalars(c.t);
    j["eps"] = codec::rational(c.eps);
    j["m"] = codec::integer(c.m);
    j["z"] = codec::integers(c.z);
    j["bound"] = codec::scalar(c.bound);
    j["method"] = toString(c.method);
    return j;
}

inline MultiplierCert multiplierFromJson(const Json& j, const std::string& path = "") {
    using namespace codec;
    MultiplierCert c;
    c.t = parseScalars(field(j, "t", path), child(path, "t"));
    c.eps = parseRationalJ(field(j, "eps", path), child(path, "eps"));
    c.m = parseInteger(field(j, "m", path), child(path, "m"));
    c.z = parseIntegers(field(j, "z", path), child(path, "z"));
    c.bound = parseScalar(field(j, "bound", path), child(path, "bound"));
    const Json& method = field(j, "method", path);
    bool known = false;
    for (auto m : {MultiplierMethod::Exhaustive, MultiplierMethod::Dirichlet, MultiplierMethod::Lll,
                   MultiplierMethod::CompactOrder, MultiplierMethod::ContinuedFraction}) {
        if (method == toString(m)) {
            c.method = m;
            known = true;
        }
    }
    if (!known) throw InputError(child(path, "method"), "unknown method");
    return c;
}

inline Json toJson(const SequenceMultiplierCert& c) {
    Json j = codec::header("sequence-multiplier");
    Json samples = Json::array();
    for (const auto& s : c.samples) samples.push_back(codec::scalars(s));
    j["samples"] = samples;
    j["eps"] = codec::rational(c.eps);
    j["quorum"] = c.quorum;
    j["m"] = codec::integer(c.m);
    Json per = Json::object();
    Json listed = Json::array();
    for (const auto& [n, e] : c.perIndex) {
        per[std::to_string(n)] = Json{{"z", codec::integers(e.z)}, {"bound", codec::scalar(e.bound)}};
        listed.push_back(n);
    }
    j["M"] = listed;
    j["perIndex"] = per;
    return j;
}

inline SequenceMultiplierCert sequenceFromJson(const Json& j, const std::string& path = "") {
    using namespace codec;
    SequenceMultiplierCert c;
    const Json& samples = array(field(j, "samples", path), child(path, "samples"));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        c.samples.push_back(parseScalars(samples[i], child(child(path, "samples"), i)));
    }
    c.eps = parseRationalJ(field(j, "eps", path), child(path, "eps"));
    c.quorum = parseCount(field(j, "quorum", path), child(path, "quorum"));
    c.m = parseInteger(field(j, "m", path), child(path, "m"));
    const Json& per = field(j, "perIndex", path);
    const std::string pp = child(path, "perIndex");
    if (!per.is_object()) throw InputError(pp, "expected an object");
    for (auto it = per.begin(); it != per.end(); ++it) {
        const std::string p = child(pp, it.key());
        c.perIndex.emplace(parseCoord(it.key(), p),
                           IndexCert{parseIntegers(field(it.value(), "z", p), child(p, "z")),
                                     parseScalar(field(it.value(), "bound", p), child(p, "bound"))});
    }
    return c;
}

inline Json toJson(const RelationCert& c) {
    Json j = codec::header("relation");
    j["inputs"] = codec::scalars(c.inputs);
    j["eps"] = codec::rational(c.eps);
    j["z"] = codec::integers(c.z);
    j["bound"] = codec::rational(c.bound);
    j["height"] = codec::integer(c.height);
    return j;
}

inline RelationCert relationFromJson(const Json& j, const std::string& path = "") {
    using namespace codec;
    RelationCert c;
    c.inputs = parseScalars(field(j, "inputs", path), child(path, "inputs"));
    c.eps = parseRationalJ(field(j, "eps", path), child(path, "eps"));
    c.z = parseIntegers(field(j, "z", path), child(path, "z"));
    c.bound = parseRationalJ(field(j, "bound", path), child(path, "bound"));
    c.height = parseInteger(field(j, "height", path), child(path, "height"));
    return c;
}

inline Json toJson(const WitnessDefeater& d) {
    Json j = codec::header("defeater");
    j["W"] = codec::nbhd(d.w);
    j["U"] = codec::nbhd(d.u);
    j["a"] = d.a;
    j["aVector"] = codec::vector(d.aVector);
    j["m"] = codec::integer(d.m);
    j["F"] = codec::indices(d.f);
    j["FVectors"] = codec::vectors(d.fVectors);
    j["z"] = codec::integers(d.z);
    j["bound"] = codec::scalar(d.bound);
    return j;
}

inline WitnessDefeater defeaterFromJson(const Json& j, const std::string& path = "") {
    using namespace codec;
    WitnessDefeater d;
    d.w = parseNbhd(field(j, "W", path), child(path, "W"));
    d.u = parseNbhd(field(j, "U", path), child(path, "U"));
    d.a = parseCount(field(j, "a", path), child(path, "a"));
    d.aVector = parseVector(field(j, "aVector", path), child(path, "aVector"));
    d.m = parseInteger(field(j, "m", path), child(path, "m"));
    d.f = parseIndices(field(j, "F", path), child(path, "F"));
    d.fVectors = parseVectors(field(j, "FVectors", path), child(path, "FVectors"));
    d.z = parseIntegers(field(j, "z", path), child(path, "z"));
    d.bound = parseScalar(field(j, "bound", path), child(path, "bound"));
    return d;
}

inline Json summabilitySetJson(const Family& f, const BasicNbhd& v, const std::vector<std::size_t>& set) {
    Json j = codec::header("summability-set");
    j["family"] = codec::family(f);
    j["V"] = codec::nbhd(v);
    j["F"] = codec::indices(set);
    return j;
}

inline Json summabilityCounterexampleJson(const Family& f, const BasicNbhd& v) {
    Json j = codec::header("summability-counterexample");
    j["family"] = codec::family(f);
    j["V"] = codec::nbhd(v);
    return j;
}

inline Json toJson(const WitnessData& w, const BasicNbhd& target) {
    Json j = codec::header("witness");
    j["members"] = codec::vectors(w.members);
    j["W"] = codec::nbhd(target);
    j["U"] = codec::nbhd(w.u);
    Json pivots = Json::array();
    for (Coord c : w.pivots) pivots.push_back(c);
    j["pivots"] = pivots;
    j["leftInverse"] = codec::matrix(w.leftInverse);
    j["normBound"] = codec::rational(w.normBound);
    j["memberBound"] = codec::rational(w.memberBound);
    return j;
}

inline Json toJson(const SeparationCert& c) {
    Json j = codec::header("separation");
    j["a"] = c.a;
    j["aVector"] = codec::vector(c.aVector);
    j["coords"] = codec::coords(c.coords);
    j["generatorIndices"] = codec::indices(c.generatorIndices);
    j["generators"] = codec::vectors(c.generators);
    j["functional"] = codec::functional(c.functional);
    return j;
}

inline SeparationCert separationFromJson(const Json& j, const std::string& path = "") {
    using namespace codec;
    SeparationCert c;
    c.a = parseCount(field(j, "a", path), child(path, "a"));
    c.aVector = parseVector(field(j, "aVector", path), child(path, "aVector"));
    c.coords = parseCoords(field(j, "coords", path), child(path, "coords"));
    c.generatorIndices = parseIndices(field(j, "generatorIndices", path), child(path, "generatorIndices"));
    c.generators = parseVectors(field(j, "generators", path), child(path, "generators"));
    c.functional = parseFunctional(field(j, "functional", path), child(path, "functional"));
    return c;
}

inline Json continuityStepJson(const Family& f, const ContinuityStep& s) {
    Json j = codec::header("continuity-step");
    j["family"] = codec::family(f);
    j["V"] = codec::nbhd(s.v);
    j["F"] = codec::indices(s.f);
    j["eta"] = codec::rational(s.eta);
    return j;
}

inline Json coordinateBoundJson(const Family& f, const CoordinateBound& b) {
    Json j = codec::header("coordinate-bound");
    j["family"] = codec::family(f);
    j["a"] = b.a;
    j["functional"] = codec::functional(b.functional);
    j["K"] = codec::rational(b.k);
    return j;
}

inline Json memberRelationJson(const std::vector<SparseVector>& members, const IntegerVector& z) {
    Json j = codec::header("member-relation");
    j["members"] = codec::vectors(members);
    j["z"] = codec::integers(z);
    return j;
}

// ---------------------------------------------------------------------------------------------
// verification from the serialized form

namespace detail {

inline Scalar applyFunctional(const std::map<Coord, Scalar>& y, const SparseVector& x) {
    Scalar s;
    for (const auto& [c, yc] : y) s = s + yc * x.get(c);
    return s;
}

inline bool verifyWitnessJson(const Json& j) {
    using namespace codec;
    const std::vector<SparseVector> members = parseVectors(field(j, "members", ""), "/members");
    const BasicNbhd w = parseNbhd(field(j, "W", ""), "/W");
    const BasicNbhd u = parseNbhd(field(j, "U", ""), "/U");
    std::vector<Coord> pivots;
    for (const auto& p : array(field(j, "pivots", ""), "/pivots")) pivots.push_back(p.get<Coord>());
    const Matrix r = parseMatrix(field(j, "leftInverse", ""), "/leftInverse");
    const Rational normBound = parseRationalJ(field(j, "normBound", ""), "/normBound");
    const Rational memberBound = parseRationalJ(field(j, "memberBound", ""), "/memberBound");
    const std::size_t k = members.size();
    if (k == 0) return u == w;
    if (pivots.size() != k || r.size() != k) return false;
    if (u.coords != CoordSet(pivots.begin(), pivots.end())) return false;
    // R (M_P)^T = I: z = R x_P recovers the coefficients.
    for (std::size_t i = 0; i < k; ++i) {
        if (r[i].size() != k) return false;
        for (std::size_t a = 0; a < k; ++a) {
            Scalar s;
            for (std::size_t p = 0; p < k; ++p) s = s + r[i][p] * members[a].get(pivots[p]);
            if (!(s == Scalar(i == a ? 1 : 0))) return false;
        }
    }
    const Rational g = dyadic(64);
    for (const auto& row : r) {
        Scalar sum;
        for (const Scalar& x : row) sum = sum + abs(x);
        if (compare(sum, Scalar(normBound), g) == Ordering::Greater) return false;
    }
    if (memberBound < 1) return false;
    for (const auto& a : members) {
        if (compare(seminorm(a, w.coords), Scalar(memberBound), g) == Ordering::Greater) return false;
    }
    return u.radius * normBound * memberBound <= w.radius;
}

inline bool verifyMemberRelationJson(const Json& j) {
    const auto members = codec::parseVectors(codec::field(j, "members", ""), "/members");
    const IntegerVector z = codec::parseIntegers(codec::field(j, "z", ""), "/z");
    if (z.size() != members.size() || std::all_of(z.begin(), z.end(), [](const Integer& x) { return x == 0; })) {
        return false;
    }
    SparseVector sum;
    for (std::size_t i = 0; i < z.size(); ++i) sum += Scalar(Rational(z[i])) * members[i];
    return sum.isExact() && sum.isZero();
}

inline bool verifyCounterexampleJson(const Json& j) {
    const Family f = codec::parseFamily(codec::field(j, "family", ""), "/family");
    const BasicNbhd v = codec::parseNbhd(codec::field(j, "V", ""), "/V");
    // Every tail member is nonzero on V with the same value, so removing finitely many leaves
    // members whose multiples leave V.
    return f.tail && !f.tail->base.restrictedTo(v.coords).isZero();
}

inline bool verifyContinuityJson(const Json& j) {
    using namespace codec;
    const Family f = parseFamily(field(j, "family", ""), "/family");
    const BasicNbhd v = parseNbhd(field(j, "V", ""), "/V");
    const std::vector<std::size_t> set = parseIndices(field(j, "F", ""), "/F");
    const Rational eta = parseRationalJ(field(j, "eta", ""), "/eta");
    if (eta <= 0 || !verifySummabilitySet(f, v, set)) return false;
    Scalar total;
    for (std::size_t i : set) total = total + seminorm(f.member(i), v.coords);
    return compare(total.scaledBy(eta), Scalar(v.radius), dyadic(64)) == Ordering::Less;
}

inline bool verifyCoordinateBoundJson(const Json& j) {
    using namespace codec;
    const Family f = parseFamily(field(j, "family", ""), "/family");
    const std::size_t a = parseCount(field(j, "a", ""), "/a");
    const auto y = parseFunctional(field(j, "functional", ""), "/functional");
    const Rational k = parseRationalJ(field(j, "K", ""), "/K");
    CoordSet supp;
    Scalar l1;
    for (const auto& [c, yc] : y) {
        supp.insert(c);
        l1 = l1 + abs(yc);
    }
    if (!(applyFunctional(y, f.member(a)) == Scalar(1))) return false;
    for (std::size_t g : visibleMembers(f, supp, a)) {
        if (!applyFunctional(y, f.member(g)).isZero()) return false;
    }
    return compare(l1, Scalar(k), dyadic(64)) != Ordering::Greater;
}

}  // namespace detail

/// Re-checks a certificate document (or every certificate inside a report) without searching.
inline bool verifyDocument(const Json& j) {
    const std::string kind = codec::field(j, "kind", "").get<std::string>();
    if (kind == "multiplier") return verifyMultiplier(multiplierFromJson(j));
    if (kind == "sequence-multiplier") return verifySequenceMultiplier(sequenceFromJson(j));
    if (kind == "relation") return verifyRelation(relationFromJson(j));
    if (kind == "defeater") return verifyDefeater(defeaterFromJson(j));
    if (kind == "separation") return verifySeparation(separationFromJson(j));
    if (kind == "witness") return detail::verifyWitnessJson(j);
    if (kind == "summability-set") {
        return verifySummabilitySet(codec::parseFamily(codec::field(j, "family", ""), "/family"),
                                    codec::parseNbhd(codec::field(j, "V", ""), "/V"),
                                    codec::parseIndices(codec::field(j, "F", ""), "/F"));
    }
    if (kind == "member-relation") return detail::verifyMemberRelationJson(j);
    if (kind == "summability-counterexample") return detail::verifyCounterexampleJson(j);
    if (kind == "continuity-step") return detail::verifyContinuityJson(j);
    if (kind == "coordinate-bound") return detail::verifyCoordinateBoundJson(j);
    if (j.contains("certificates")) {
        const Json& certs = codec::array(j["certificates"], "/certificates");
        for (std::size_t i = 0; i < certs.size(); ++i) {
            try {
                if (!verifyDocument(certs[i])) return false;
            } catch (const InputError& e) {
                throw InputError("/certificates/" + std::to_string(i) + e.where(), e.what());
            }
        }
        return true;
    }
    throw InputError("/kind", "no certificate of kind \"" + kind + "\"");
}

}  // namespace kalspan
