#pragma once

#include <string>

#include "actopo/scenes.hpp"

namespace actopo {

/// Standalone SVG 1.1 (viewBox 1000x700). A pure function of the scene: the
/// same scene always renders to the same bytes. Throws RenderError on an
/// invalid scene.
std::string render_svg(const SceneArtifact& scene);

}  // namespace actopo
