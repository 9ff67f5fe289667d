#pragma once

#include "subrad/types.hpp"
#include "subrad/geometry.hpp"
#include "subrad/spectral.hpp"
#include "subrad/asymptotics.hpp"
#include "subrad/multi_excitation.hpp"
#include "subrad/effective_model.hpp"
#include "subrad/config.hpp"
#include "subrad/output.hpp"
#include "subrad/verify.hpp"
#include "subrad/commands.hpp"
