#include "config.hpp"

#include <cmath>

#include "toalab/error.hpp"
#include "toalab/io.hpp"

namespace toalab::runner {

Node::Node(const json& value, std::string path) : value_(&value), path_(std::move(path)) {
    if (!value.is_object()) throw ValidationError("config: " + path_ + " must be a JSON object");
}

void Node::fail(const std::string& key, const std::string& message) const {
    throw ValidationError("config: " + path_ + "." + key + ": " + message);
}

bool Node::has(const std::string& key) const { return value_->contains(key) && !value_->at(key).is_null(); }

const json& Node::raw(const std::string& key) const {
    used_.insert(key);
    if (!value_->contains(key)) fail(key, "missing required key");
    return value_->at(key);
}

Node Node::child(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_object()) fail(key, "expected an object");
    return Node(v, path_ + "." + key);
}

std::optional<Node> Node::optional_child(const std::string& key) const {
    used_.insert(key);
    if (!has(key)) return std::nullopt;
    return child(key);
}

std::vector<Node> Node::children(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array()) fail(key, "expected a list of objects");
    std::vector<Node> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k].is_object()) fail(key, "expected a list of objects");
        out.emplace_back(v[k], path_ + "." + key + "[" + std::to_string(k) + "]");
    }
    return out;
}

double Node::number(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
}

double Node::number_or(const std::string& key, double fallback) const {
    used_.insert(key);
    return has(key) ? number(key) : fallback;
}

double Node::positive(const std::string& key) const {
    const double x = number(key);
    if (!(x > 0.0)) fail(key, "must be > 0");
    return x;
}

std::size_t Node::count(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "expected a non-negative integer");
    return v.get<std::size_t>();
}

std::size_t Node::count_or(const std::string& key, std::size_t fallback) const {
    used_.insert(key);
    return has(key) ? count(key) : fallback;
}

std::string Node::text(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
}

std::string Node::text_or(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    return has(key) ? text(key) : fallback;
}

bool Node::flag_or(const std::string& key, bool fallback) const {
    used_.insert(key);
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
}

std::vector<double> Node::numbers(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array()) fail(key, "expected a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(key, "expected a list of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void Node::finish() const {
    for (const auto& item : value_->items()) {
        if (!used_.count(item.key())) throw ValidationError("config: " + path_ + ": unknown key '" + item.key() + "'");
    }
}

cplx complex_entry(const json& e, const std::string& where) {
    if (e.is_number()) return e.get<double>();
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        return {e[0].get<double>(), e[1].get<double>()};
    }
    throw ValidationError("config: " + where + ": entries must be numbers or [re, im] pairs");
}

ComplexMatrix complex_matrix(const json& v, const std::string& where, bool square) {
    if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty()) {
        throw ValidationError("config: " + where + ": expected a non-empty list of rows");
    }
    const auto rows = static_cast<Eigen::Index>(v.size());
    const auto cols = static_cast<Eigen::Index>(v[0].size());
    if (square && rows != cols) throw ValidationError("config: " + where + ": matrix must be square");
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = v[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ValidationError("config: " + where + ": rows must have equal length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_entry(row[static_cast<std::size_t>(c)], where);
    }
    return m;
}

TimeGrid time_grid(const Node& node) {
    const TimeGrid g(node.number("t_min"), node.number("t_max"), node.count("n_points"));
    node.finish();
    return g;
}

MomentumGrid momentum_grid(const Node& node) {
    const MomentumGrid g(node.number("p_min"), node.number("p_max"), node.count("n_points"));
    node.finish();
    return g;
}

Dispersion dispersion(const Node& node) {
    const DispersionKind kind = dispersion_kind_from_string(node.text("kind"));
    const double m = node.number("mass");
    Dispersion d = Dispersion::nonrelativistic(1.0);
    switch (kind) {
        case DispersionKind::nonrelativistic: d = Dispersion::nonrelativistic(m); break;
        case DispersionKind::relativistic: d = Dispersion::relativistic(m); break;
        case DispersionKind::threshold_shifted: d = Dispersion::threshold_shifted(m, node.number("E0")); break;
    }
    node.finish();
    return d;
}

Tolerances tolerances(const std::optional<Node>& node, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("--tolerance-scale must be > 0");
    Tolerances t;
    if (node) {
        t.hermitian = node->number_or("hermitian", t.hermitian);
        t.psd = node->number_or("psd", t.psd);
        t.trace = node->number_or("trace", t.trace);
        t.outcome_sum = node->number_or("outcome_sum", t.outcome_sum);
        t.commutator = node->number_or("commutator", t.commutator);
        t.norm = node->number_or("norm", t.norm);
        t.weights = node->number_or("weights", t.weights);
        t.support = node->number_or("support", t.support);
        t.clipped_mass = node->number_or("clipped_mass", t.clipped_mass);
        node->finish();
    }
    return t.scaled(scale);
}

WavePacket wave_packet(const Node& node) {
    const MomentumGrid grid = momentum_grid(node.child("grid"));
    std::vector<std::pair<cplx, WavePacket>> terms;
    for (const Node& p : node.children("packets")) {
        const double p0 = p.number("p0");
        const double dp = p.positive("dp");
        const double x0 = p.number_or("x0", 0.0);
        const cplx amplitude = p.has("amplitude") ? complex_entry(p.raw("amplitude"), p.path() + ".amplitude") : 1.0;
        p.finish();
        terms.emplace_back(amplitude, gaussian_packet(grid, p0, dp, x0));
    }
    node.finish();
    if (terms.empty()) throw ValidationError("config: " + node.path() + ".packets: at least one packet is required");
    if (terms.size() == 1) return terms.front().second;
    return superpose(terms);
}

double leading_momentum(const Node& node) { return node.children("packets").front().number("p0"); }

std::string csv_number(double value) { return format_double(value); }

}  // namespace toalab::runner
