#pragma once

// Synthetic handwritten-word image corpus generator: font catalog, word
// typesetting, appearance modelling, affine augmentation, deterministic
// parallel corpus generation, and corpus statistics.

#include "hwforge/appearance.hpp"
#include "hwforge/config.hpp"
#include "hwforge/corpus_analytics.hpp"
#include "hwforge/corpus_builder.hpp"
#include "hwforge/corpus_types.hpp"
#include "hwforge/error.hpp"
#include "hwforge/font_catalog.hpp"
#include "hwforge/font_face.hpp"
#include "hwforge/geometry.hpp"
#include "hwforge/image.hpp"
#include "hwforge/png_io.hpp"
#include "hwforge/rng.hpp"
#include "hwforge/typesetter.hpp"
#include "hwforge/utf8.hpp"
#include "hwforge/version.hpp"
