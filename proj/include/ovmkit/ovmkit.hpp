#pragma once

#include "ovmkit/channel.hpp"
#include "ovmkit/decompose.hpp"
#include "ovmkit/json_io.hpp"
#include "ovmkit/linalg.hpp"
#include "ovmkit/measure.hpp"
#include "ovmkit/operator_measure.hpp"
#include "ovmkit/qrv.hpp"
#include "ovmkit/sample_space.hpp"
#include "ovmkit/tomography.hpp"
