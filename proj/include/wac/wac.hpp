#pragma once

#include "wac/agents.hpp"
#include "wac/consensus.hpp"
#include "wac/error.hpp"
#include "wac/graph.hpp"
#include "wac/io.hpp"
#include "wac/linalg.hpp"
#include "wac/trace.hpp"
