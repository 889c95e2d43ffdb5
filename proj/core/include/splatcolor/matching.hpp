#pragma once

#include <string>
#include <vector>

#include "splatcolor/features.hpp"

namespace splatcolor {

// One matched cell: the reference view and cell whose grayscale feature is
// globally nearest to the target cell's.
struct Correspondence {
    int ref = -1;     // index into the reference list
    int i = -1, j = -1;
    double distance = 0;
};

struct CorrespondenceMap {
    int height_f = 0;
    int width_f = 0;
    int patch = 0;
    int stride = 0;
    std::vector<Correspondence> cells;  // row-major, height_f * width_f

    const Correspondence& at(int i, int j) const {
        return cells[static_cast<size_t>(i) * width_f + j];
    }
};

// Cosine distance 1 - <a,b>/(|a||b|); a zero vector on either side is defined
// to be at distance 1 from everything.
double cosine_distance(std::span<const double> a, std::span<const double> b);

// Exhaustive argmin over all reference cells for every target cell, ties
// broken by lowest (ref, i, j) lexicographically. Throws InvalidInputError
// when feature dims or patch/stride geometry disagree, or no reference is
// given.
CorrespondenceMap match_features(const FeatureMap& target, const std::vector<FeatureMap>& refs,
                                 int threads = 0);

// Inspection export.
void save_correspondence_json(const CorrespondenceMap& map, const std::string& path);

}  // namespace splatcolor
