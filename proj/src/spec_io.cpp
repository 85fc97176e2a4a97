#include "plmm/spec_io.hpp"
#include "plmm/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace plmm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    raise(ErrorCode::ParseError, (path.empty() ? "/" : path) + ": " + msg);
}

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (item.key() == a) {
                known = true;
                break;
            }
        if (!known) fail(path + "/" + item.key(), "unknown key");
    }
}

const json* get(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const json& require(const json& j, const char* key, const std::string& path) {
    const json* p = get(j, key);
    if (!p) fail(path, std::string("missing required key \"") + key + "\"");
    return *p;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
}

template <std::size_t N>
std::array<double, N> as_tuple(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != N)
        fail(path, "expected an array of " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = as_number(j[i], path + "/" + std::to_string(i));
    return out;
}

MonotoneMap parse_map(const json& j, const std::string& path) {
    expect_object(j, path);
    const json& kind = require(j, "kind", path);
    if (!kind.is_string()) fail(path + "/kind", "expected a string");
    const std::string k = kind.get<std::string>();
    MonotoneMap m;
    if (k == "identity") {
        check_keys(j, path, {"kind"});
        m.kind = MonotoneMap::Kind::Identity;
    } else if (k == "power") {
        check_keys(j, path, {"kind", "gamma"});
        m.kind = MonotoneMap::Kind::Power;
        m.a = as_number(require(j, "gamma", path), path + "/gamma");
    } else if (k == "affine") {
        check_keys(j, path, {"kind", "scale", "offset"});
        m.kind = MonotoneMap::Kind::Affine;
        m.a = as_number(require(j, "scale", path), path + "/scale");
        if (const json* o = get(j, "offset")) m.b = as_number(*o, path + "/offset");
    } else if (k == "log1p_scale") {
        check_keys(j, path, {"kind", "k"});
        m.kind = MonotoneMap::Kind::Log1pScale;
        m.a = as_number(require(j, "k", path), path + "/k");
    } else {
        fail(path + "/kind", "unknown map kind \"" + k + "\"");
    }
    return m;
}

TransformChain parse_transform(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"rotation_degrees", "maps"});
    TransformChain chain;
    if (const json* r = get(j, "rotation_degrees"))
        chain.rotation_degrees = as_number(*r, path + "/rotation_degrees");
    if (const json* m = get(j, "maps")) {
        if (!m->is_array() || m->size() != 2) fail(path + "/maps", "expected an array of 2 maps");
        chain.maps[0] = parse_map((*m)[0], path + "/maps/0");
        chain.maps[1] = parse_map((*m)[1], path + "/maps/1");
    }
    return chain;
}

Optimum parse_optimum(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"position", "base_value", "slope", "rank", "persists_at_top"});
    Optimum o;
    const auto p = as_tuple<2>(require(j, "position", path), path + "/position");
    o.position = {p[0], p[1]};
    if (const json* v = get(j, "base_value")) o.base_value = as_number(*v, path + "/base_value");
    if (const json* v = get(j, "slope")) o.slope = as_number(*v, path + "/slope");
    if (const json* v = get(j, "rank")) o.rank = as_int(*v, path + "/rank");
    if (const json* v = get(j, "persists_at_top"))
        o.persists_at_top = as_bool(*v, path + "/persists_at_top");
    return o;
}

NestingNode parse_node(const json& j, const std::string& path);

ChildLink parse_link(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"scale", "rotation_degrees", "value_gain", "anchor", "node"});
    ChildLink link;
    if (const json* v = get(j, "scale")) link.scale = as_number(*v, path + "/scale");
    if (const json* v = get(j, "rotation_degrees"))
        link.rotation_degrees = as_int(*v, path + "/rotation_degrees");
    if (const json* v = get(j, "value_gain")) {
        if (!v->is_null()) link.value_gain = as_number(*v, path + "/value_gain");
    }
    const json& anchor = require(j, "anchor", path);
    expect_object(anchor, path + "/anchor");
    check_keys(anchor, path + "/anchor", {"optimum", "offset"});
    link.anchor.optimum_index = as_int(require(anchor, "optimum", path + "/anchor"),
                                       path + "/anchor/optimum");
    if (const json* o = get(anchor, "offset")) {
        const auto off = as_tuple<2>(*o, path + "/anchor/offset");
        link.anchor.offset = {off[0], off[1]};
    }
    link.child = std::make_unique<NestingNode>(parse_node(require(j, "node", path), path + "/node"));
    return link;
}

NestingNode parse_node(const json& j, const std::string& path) {
    expect_object(j, path);
    check_keys(j, path, {"box", "optima", "children"});
    NestingNode node;
    if (const json* b = get(j, "box")) {
        expect_object(*b, path + "/box");
        check_keys(*b, path + "/box", {"min", "max"});
        const auto lo = as_tuple<3>(require(*b, "min", path + "/box"), path + "/box/min");
        const auto hi = as_tuple<3>(require(*b, "max", path + "/box"), path + "/box/max");
        node.primitive.box = {{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}};
    }
    if (const json* o = get(j, "optima")) {
        if (!o->is_array()) fail(path + "/optima", "expected an array");
        node.primitive.optima.clear();
        for (std::size_t i = 0; i < o->size(); ++i)
            node.primitive.optima.push_back(
                parse_optimum((*o)[i], path + "/optima/" + std::to_string(i)));
    }
    if (const json* c = get(j, "children")) {
        if (!c->is_array()) fail(path + "/children", "expected an array");
        for (std::size_t i = 0; i < c->size(); ++i)
            node.children.push_back(parse_link((*c)[i], path + "/children/" + std::to_string(i)));
    }
    return node;
}

json map_to_json(const MonotoneMap& m) {
    switch (m.kind) {
    case MonotoneMap::Kind::Identity: return {{"kind", "identity"}};
    case MonotoneMap::Kind::Power: return {{"kind", "power"}, {"gamma", m.a}};
    case MonotoneMap::Kind::Affine:
        return {{"kind", "affine"}, {"scale", m.a}, {"offset", m.b}};
    case MonotoneMap::Kind::Log1pScale: return {{"kind", "log1p_scale"}, {"k", m.a}};
    }
    return {{"kind", "identity"}};
}

json node_to_json(const NestingNode& node) {
    json j;
    const Box3& b = node.primitive.box;
    j["box"] = {{"min", {b.min.x, b.min.y, b.min.z}}, {"max", {b.max.x, b.max.y, b.max.z}}};
    json optima = json::array();
    for (const Optimum& o : node.primitive.optima)
        optima.push_back({{"position", {o.position.x, o.position.y}},
                          {"base_value", o.base_value},
                          {"slope", o.slope},
                          {"rank", o.rank},
                          {"persists_at_top", o.persists_at_top}});
    j["optima"] = std::move(optima);
    json children = json::array();
    for (const ChildLink& link : node.children) {
        json c = {{"scale", link.scale},
                  {"rotation_degrees", link.rotation_degrees},
                  {"anchor",
                   {{"optimum", link.anchor.optimum_index},
                    {"offset", {link.anchor.offset.x, link.anchor.offset.y}}}},
                  {"node", node_to_json(*link.child)}};
        if (!std::isnan(link.value_gain)) c["value_gain"] = link.value_gain;
        children.push_back(std::move(c));
    }
    j["children"] = std::move(children);
    return j;
}

} // namespace

ProblemSpecFile parse_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        raise(ErrorCode::ParseError, "JSON syntax error at line " + std::to_string(line) +
                                         ", column " + std::to_string(col));
    }

    expect_object(j, "");
    check_keys(j, "", {"schema_version", "seed", "spacing", "transform", "root"});
    const json& ver = require(j, "schema_version", "");
    if (!ver.is_string() || ver.get<std::string>() != "1")
        fail("/schema_version", "unsupported schema version, expected \"1\"");

    ProblemSpecFile spec;
    if (const json* s = get(j, "seed")) {
        if (!s->is_number_integer()) fail("/seed", "expected a non-negative integer");
        if (!s->is_number_unsigned() && s->get<std::int64_t>() < 0)
            fail("/seed", "expected a non-negative integer");
        spec.seed = s->get<std::uint64_t>();
    }
    if (const json* s = get(j, "spacing")) {
        const auto h = as_tuple<3>(*s, "/spacing");
        spec.spacing = {h[0], h[1], h[2]};
    }
    if (const json* t = get(j, "transform")) spec.chain = parse_transform(*t, "/transform");
    spec.root = parse_node(require(j, "root", ""), "/root");
    spec.root.primitive.spacing = spec.spacing;
    return spec;
}

ProblemSpecFile load_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open spec file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) raise(ErrorCode::IoError, "cannot read spec file: " + path);
    return parse_spec(ss.str());
}

std::string canonical_spec(const ProblemSpecFile& spec) {
    json j;
    j["schema_version"] = "1";
    j["seed"] = spec.seed;
    j["spacing"] = {spec.spacing.x, spec.spacing.y, spec.spacing.z};
    j["transform"] = {{"rotation_degrees", spec.chain.rotation_degrees},
                      {"maps", {map_to_json(spec.chain.maps[0]), map_to_json(spec.chain.maps[1])}}};
    j["root"] = node_to_json(spec.root);
    return j.dump(2) + "\n";
}

Problem build_problem(ProblemSpecFile& spec) {
    spec.root.primitive.spacing = spec.spacing;
    return compose_problem(spec.root, spec.chain);
}

} // namespace plmm
