#pragma once

#include "vast/assoc_stats.hpp"
#include "vast/contexts.hpp"
#include "vast/embed_store.hpp"
#include "vast/error.hpp"
#include "vast/fixture.hpp"
#include "vast/isolate.hpp"
#include "vast/lexicon.hpp"
#include "vast/pipeline.hpp"
#include "vast/probe.hpp"
#include "vast/util.hpp"
