#pragma once

// Core library: everything except the HTTP front ends (vesna/server.hpp).

#include "vesna/agent.hpp"
#include "vesna/belief.hpp"
#include "vesna/cli.hpp"
#include "vesna/error.hpp"
#include "vesna/messages.hpp"
#include "vesna/nlu.hpp"
#include "vesna/pipeline.hpp"
#include "vesna/scene.hpp"
#include "vesna/scene_service.hpp"
#include "vesna/store.hpp"
#include "vesna/text.hpp"
