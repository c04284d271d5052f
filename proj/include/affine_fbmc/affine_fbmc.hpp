// affine_fbmc.hpp - umbrella header
#pragma once

#include "affine_fbmc/affine_codec.hpp"
#include "affine_fbmc/channel.hpp"
#include "affine_fbmc/common.hpp"
#include "affine_fbmc/fbmc_modem.hpp"
#include "affine_fbmc/harness.hpp"
#include "affine_fbmc/oqam_mapper.hpp"
#include "affine_fbmc/prototype_filter.hpp"
#include "affine_fbmc/receiver.hpp"
