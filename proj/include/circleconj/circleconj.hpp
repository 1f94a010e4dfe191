#pragma once

#include "circleconj/error.hpp"
#include "circleconj/numerics.hpp"
#include "circleconj/numberth.hpp"
#include "circleconj/mocs.hpp"
#include "circleconj/maps.hpp"
#include "circleconj/crossratio.hpp"
#include "circleconj/denjoy.hpp"
#include "circleconj/conjugacy.hpp"
#include "circleconj/integrability.hpp"
