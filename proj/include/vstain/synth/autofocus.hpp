#pragma once

#include <vector>

#include "vstain/img/image.hpp"
#include "vstain/synth/psf.hpp"
#include "vstain/synth/scene.hpp"

namespace vstain::synth {

// Axial range the defocus data is drawn from, and the half-width of the
// near-focus band. Samples with |z| <= kNearFocusBand look focused.
inline constexpr double kMinZ = -12.0;
inline constexpr double kMaxZ = 8.0;
inline constexpr double kNearFocusBand = 2.0;

inline bool is_near_focus(double z_um) noexcept {
  return z_um >= -kNearFocusBand && z_um <= kNearFocusBand;
}

struct AfSample {
  img::ImageGrid defocused;
  img::ImageGrid focused;
  double z = 0.0;
  bool near_focus = false;
  int scene_index = 0;
};

enum class NearFocusPolicy { kReject, kFlag };

// One focused membrane render per scene and one defocused copy per z. The
// focused image is shared by all pairs of a scene.
std::vector<AfSample> make_af_dataset(const SceneSpec& spec, int scene_count,
                                      const std::vector<double>& z_values, const PsfModel& psf,
                                      NearFocusPolicy policy = NearFocusPolicy::kReject);

}  // namespace vstain::synth
