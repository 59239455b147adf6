#pragma once

#include "xstring/binary.hpp"
#include "xstring/codec.hpp"
#include "xstring/error.hpp"
#include "xstring/folding.hpp"
#include "xstring/grammar.hpp"
#include "xstring/metrics.hpp"
#include "xstring/substitution.hpp"
#include "xstring/transforms.hpp"
#include "xstring/xml.hpp"
