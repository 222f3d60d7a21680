#include "vstain/synth/autofocus.hpp"

#include <cmath>
#include <sstream>

#include "vstain/error.hpp"
#include "vstain/rng.hpp"

namespace vstain::synth {

std::vector<AfSample> make_af_dataset(const SceneSpec& spec, int scene_count,
                                      const std::vector<double>& z_values, const PsfModel& psf,
                                      NearFocusPolicy policy) {
  spec.validate();
  psf.validate();
  if (scene_count < 1) throw ConfigError("autofocus dataset needs at least one scene");
  for (double z : z_values) {
    if (!std::isfinite(z) || z < kMinZ || z > kMaxZ) {
      std::ostringstream msg;
      msg << "z = " << z << " um is outside the supported range [" << kMinZ << ", " << kMaxZ
          << "]";
      throw ConfigError(msg.str());
    }
  }
  std::vector<double> admitted;
  for (double z : z_values) {
    if (!is_near_focus(z) || policy == NearFocusPolicy::kFlag) admitted.push_back(z);
  }
  if (admitted.empty()) {
    throw DatasetError("every z value lies in the near-focus exclusion band |z| <= 2 um");
  }

  std::vector<AfSample> samples;
  samples.reserve(admitted.size() * static_cast<std::size_t>(scene_count));
  for (int s = 0; s < scene_count; ++s) {
    SceneSpec scene_spec = spec;
    scene_spec.seed = scene_seed(spec.seed, static_cast<std::uint64_t>(s));
    const CellScene scene = gen_scene(scene_spec);
    const img::ImageGrid clean = render_membrane(scene);
    const CounterRng noise = CounterRng(scene.rng_trace).split("af.noise");
    const img::ImageGrid focused =
        add_noise(clean, spec.noise_sigma, noise.split("focused").key());
    for (std::size_t k = 0; k < admitted.size(); ++k) {
      const double z = admitted[k];
      AfSample sample{
          add_noise(defocus(clean, z, psf), spec.noise_sigma, noise.split(k).key()),
          focused,
          z,
          is_near_focus(z),
          s,
      };
      samples.push_back(std::move(sample));
    }
  }
  return samples;
}

}  // namespace vstain::synth
