#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "toalab/dispersion.hpp"
#include "toalab/linalg.hpp"
#include "toalab/toa.hpp"
#include "toalab/tolerances.hpp"
#include "toalab/wavepacket.hpp"

namespace toalab::runner {

using nlohmann::json;

// Read-only view of one JSON object that remembers which keys were consumed, so finish() can
// reject typos. Every error names the dotted path of the offending key.
class Node {
public:
    Node(const json& value, std::string path);

    const std::string& path() const { return path_; }
    bool has(const std::string& key) const;
    // Marks an optional key as known without reading it.
    void touch(const std::string& key) const { used_.insert(key); }
    const json& raw(const std::string& key) const;

    Node child(const std::string& key) const;
    std::optional<Node> optional_child(const std::string& key) const;
    std::vector<Node> children(const std::string& key) const;

    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    double positive(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    std::size_t count_or(const std::string& key, std::size_t fallback) const;
    std::string text(const std::string& key) const;
    std::string text_or(const std::string& key, const std::string& fallback) const;
    bool flag_or(const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& key) const;

    // Throws on any key that was never read.
    void finish() const;

    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

private:
    const json* value_;
    std::string path_;
    mutable std::set<std::string> used_;
};

cplx complex_entry(const json& value, const std::string& where);
// Row lists of [re, im] pairs (or bare reals).
ComplexMatrix complex_matrix(const json& value, const std::string& where, bool square);

TimeGrid time_grid(const Node& node);
MomentumGrid momentum_grid(const Node& node);
Dispersion dispersion(const Node& node);
Tolerances tolerances(const std::optional<Node>& node, double scale);

// {"grid": {...}, "packets": [{"p0", "dp", "x0", "amplitude"}]}
WavePacket wave_packet(const Node& node);
// Mean momentum of the first packet, for stationary-phase reporting.
double leading_momentum(const Node& node);

std::string csv_number(double value);

}  // namespace toalab::runner
