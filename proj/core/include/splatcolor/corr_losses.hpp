#pragma once

#include "splatcolor/image.hpp"
#include "splatcolor/matching.hpp"

namespace splatcolor {

struct CorrLoss {
    double loss = 0;
    ImageRGB grad;  // dLoss/dPixel at the rendered (coarse) resolution
    int cells = 0;  // cells entering the mean
};

// Feature-space color propagation loss: mean cosine distance between the
// rendered image's patch-mean descriptors and the guidance descriptors looked
// up at the matched reference cells. Both the rendered image and the
// reference feature maps live at the coarse (downscaled) resolution the
// matching ran on. Gradients flow through the patch means analytically; cells
// whose rendered or guidance descriptor is the zero vector contribute
// distance 1 with zero gradient.
// Throws InvalidInputError when the rendered image's patch grid does not
// match `corr` or the reference maps disagree with it.
CorrLoss tcm_loss(const ImageRGB& rendered, const CorrespondenceMap& corr,
                  const std::vector<FeatureMap>& ref_color_feats);

// Patch-level color agreement on the disjoint sub-grid of the shared
// correspondence map (cells at multiples of patch/stride, so their patches
// tile without overlap): mean squared L2 distance between each rendered
// patch's mean color and the matched reference patch's mean color. Gradient
// per pixel is 2*diff/(N*patch^2) on its own patch.
// Throws InvalidInputError on grid mismatch or when patch is not a multiple
// of stride (no disjoint sub-grid exists).
CorrLoss ccm_loss(const ImageRGB& rendered, const CorrespondenceMap& corr,
                  const std::vector<FeatureMap>& ref_color_feats);

}  // namespace splatcolor
