#include "splatcolor/matching.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "splatcolor/errors.hpp"
#include "splatcolor/parallel.hpp"

namespace splatcolor {

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    double dot = 0, na = 0, nb = 0;
    for (size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    if (na == 0 || nb == 0) return 1.0;
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

CorrespondenceMap match_features(const FeatureMap& target, const std::vector<FeatureMap>& refs,
                                 int threads) {
    if (refs.empty()) throw InvalidInputError("match_features: no reference feature maps");
    for (size_t r = 0; r < refs.size(); ++r) {
        if (refs[r].dim != target.dim)
            throw InvalidInputError("match_features: reference " + std::to_string(r) + " has dim " +
                                    std::to_string(refs[r].dim) + ", target has " +
                                    std::to_string(target.dim));
        if (refs[r].patch != target.patch || refs[r].stride != target.stride)
            throw InvalidInputError("match_features: reference " + std::to_string(r) +
                                    " patch/stride geometry differs from the target");
    }

    CorrespondenceMap map;
    map.height_f = target.height_f;
    map.width_f = target.width_f;
    map.patch = target.patch;
    map.stride = target.stride;
    map.cells.resize(target.cell_count());

    parallel_for_static(target.cell_count(), threads, [&](size_t cell, int) {
        const int ti = static_cast<int>(cell) / target.width_f;
        const int tj = static_cast<int>(cell) % target.width_f;
        const std::span<const double> f = target.cell(ti, tj);

        Correspondence best;
        double best_dist = std::numeric_limits<double>::infinity();
        for (size_t r = 0; r < refs.size(); ++r) {
            const FeatureMap& ref = refs[r];
            for (int i = 0; i < ref.height_f; ++i) {
                for (int j = 0; j < ref.width_f; ++j) {
                    const double d = cosine_distance(f, ref.cell(i, j));
                    // Strict < plus ascending scan order = lowest (ref, i, j)
                    // wins among ties.
                    if (d < best_dist) {
                        best_dist = d;
                        best = {static_cast<int>(r), i, j, d};
                    }
                }
            }
        }
        map.cells[cell] = best;
    });
    return map;
}

void save_correspondence_json(const CorrespondenceMap& map, const std::string& path) {
    nlohmann::json doc;
    doc["height_f"] = map.height_f;
    doc["width_f"] = map.width_f;
    doc["patch"] = map.patch;
    doc["stride"] = map.stride;
    nlohmann::json cells = nlohmann::json::array();
    for (const Correspondence& c : map.cells)
        cells.push_back({{"ref", c.ref}, {"i", c.i}, {"j", c.j}, {"distance", c.distance}});
    doc["cells"] = std::move(cells);
    std::ofstream f(path);
    if (!f) throw DataError("cannot write correspondence map: " + path);
    f << doc.dump() << "\n";
}

}  // namespace splatcolor
