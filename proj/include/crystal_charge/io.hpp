#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "charge_engine.hpp"
#include "crystal.hpp"
#include "errors.hpp"
#include "lemma_suite.hpp"

namespace crystal_charge {

using json = nlohmann::json;

inline json to_json(const Coord& c) { return c.to_vector(); }
inline json to_json(const Charge& c) { return c.lp().to_vector(); }

inline Box box_from_json(const json& j, std::optional<int> n = std::nullopt) {
    if (!j.is_array()) throw InvalidPartition("box must be a JSON array, got " + j.dump());
    if (n && static_cast<int>(j.size()) != *n)
        throw DimensionMismatch("box " + j.dump() + " has length " + std::to_string(j.size()) + ", expected " +
                                std::to_string(*n));
    std::vector<int> v;
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw InvalidPartition("box " + j.dump() + " has a non-integer entry");
        v.push_back(x.get<int>());
    }
    return Box::from(v);
}

/// Partition file: JSON array of boxes, each a length-n array of
/// non-negative integers. The melting rule is enforced on load.
inline Crystal partition_from_json(const json& j, std::optional<int> n = std::nullopt) {
    if (!j.is_array()) throw InvalidPartition("partition must be a JSON array of boxes");
    if (!n) {
        if (j.empty()) throw InvalidPartition("empty partition file needs an explicit dimension");
        n = static_cast<int>(j.front().size());
    }
    BoxSet boxes;
    for (const auto& b : j) {
        Box box = box_from_json(b, n);
        if (!box.nonnegative()) throw InvalidPartition("box " + box.str() + " has a negative component");
        if (!boxes.insert(box).second) throw InvalidPartition("box " + box.str() + " listed twice");
    }
    return Crystal::from_boxes(*n, std::move(boxes));
}

inline json partition_to_json(const Crystal& c) {
    json out = json::array();
    for (const auto& b : c.sorted_boxes()) out.push_back(to_json(b));
    return out;
}

inline Crystal load_partition(const std::string& path, std::optional<int> n = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InvalidPartition(path + ": " + e.what());
    }
    return partition_from_json(j, n);
}

inline void save_partition(const Crystal& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << partition_to_json(c).dump() << '\n';
}

/// Spectrum as [{charge: [...], order: k}], sorted by charge.
inline json spectrum_to_json(const PoleSpectrum& s) {
    json out = json::array();
    for (const auto& [c, o] : s.entries()) out.push_back({{"charge", to_json(c)}, {"order", o}});
    return out;
}

inline PoleSpectrum spectrum_from_json(const json& j) {
    PoleSpectrum s;
    for (const auto& e : j) s.add(normalize(box_from_json(e.at("charge"))), e.at("order").get<int>());
    return s;
}

inline json charges_to_json(const std::vector<Charge>& cs) {
    json out = json::array();
    for (const auto& c : cs) out.push_back(to_json(c));
    return out;
}

inline std::vector<int> dir_list(DirMask m) {
    std::vector<int> out;
    for (int k = 0; k < kMaxDim; ++k)
        if (m >> k & 1U) out.push_back(k);
    return out;
}

inline json report_to_json(const LemmaReport& r) {
    json j = {{"lemma", r.lemma}, {"n", r.n},           {"pass", r.pass},
              {"observed", r.observed}, {"expected", r.expected}, {"crystal_size", r.crystal_size}};
    std::ostringstream hex;
    hex << std::hex << r.crystal_digest;
    j["crystal_digest"] = hex.str();
    if (r.seed) j["seed"] = *r.seed;
    if (r.box) j["box"] = to_json(*r.box);
    if (r.d) {
        j["d"] = *r.d;
        j["dirs"] = dir_list(r.dirs);
    }
    if (!r.replay_boxes.empty()) {
        json boxes = json::array();
        for (const auto& b : r.replay_boxes) boxes.push_back(to_json(b));
        j["replay_boxes"] = std::move(boxes);
    }
    return j;
}

/// Slice-by-slice view of a crystal for plotting: boxes grouped by their
/// coordinates beyond the first three, with addable, removable and
/// simple-pole markers. A pole at charge c is drawn at the first unoccupied
/// point of the ray l'(c) + kE, or one step back when that point is not
/// addable.
inline json projection_data(const Crystal& c, const Recipe& recipe) {
    const int n = c.dim();
    if (n < 3) throw DimensionMismatch("projection view needs n >= 3");
    auto key_of = [n](const Box& b) {
        std::vector<int> k;
        for (int i = 3; i < n; ++i) k.push_back(b[i]);
        return k;
    };
    auto cell_of = [](const Box& b) { return json::array({b[0], b[1], b[2]}); };
    std::map<std::vector<int>, json> slices;
    auto slot = [&](const Box& b) -> json& {
        json& s = slices[key_of(b)];
        if (s.is_null()) s = {{"key", key_of(b)}, {"occupied", json::array()}, {"addable", json::array()},
                              {"removable", json::array()}, {"poles", json::array()}};
        return s;
    };
    for (const auto& b : c.sorted_boxes()) slot(b)["occupied"].push_back(cell_of(b));
    const auto add = addable(c);
    const auto rem = removable(c);
    for (const auto& b : add) slot(b)["addable"].push_back(cell_of(b));
    for (const auto& b : rem) slot(b)["removable"].push_back(cell_of(b));

    const PoleSpectrum spectrum = potential(c, recipe);
    const auto poles = spectrum.charges_with_order(1);
    for (const auto& p : poles) {
        Box b = p.lp();
        while (c.contains(b)) b = b.shifted(1);
        if (!c.can_add(b) && c.contains(b.shifted(-1))) b = b.shifted(-1);
        slot(b)["poles"].push_back(cell_of(b));
    }
    std::vector<Charge> markers;
    for (const auto& b : add) markers.push_back(charge_of_box(b));
    for (const auto& b : rem) markers.push_back(charge_of_box(b));
    std::sort(markers.begin(), markers.end());

    json out = {{"n", n}, {"boxes", c.size()}, {"slice_axes", json::array()}, {"slices", json::array()}};
    for (int i = 3; i < n; ++i) out["slice_axes"].push_back(i);
    for (auto& [k, s] : slices) out["slices"].push_back(std::move(s));
    out["marker_count"] = markers.size();
    out["simple_pole_count"] = poles.size();
    out["max_order"] = spectrum.max_order();
    out["markers_equal_poles"] = markers == poles && spectrum.max_order() <= 1;
    return out;
}

} // namespace crystal_charge
