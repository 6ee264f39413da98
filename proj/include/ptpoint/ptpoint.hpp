#pragma once

#include "ptpoint/contour.hpp"
#include "ptpoint/core.hpp"
#include "ptpoint/error.hpp"
#include "ptpoint/model_io.hpp"
#include "ptpoint/oracle.hpp"
#include "ptpoint/spectral.hpp"
#include "ptpoint/states.hpp"
