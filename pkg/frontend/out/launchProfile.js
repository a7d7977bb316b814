"use strict";
/**
 * Launch profile resolution: validate the user's launch configuration
 * against the session config document and decide how to reach the debug
 * endpoint (spawn it over stdio, or attach to a TCP port).
 *
 * All debugging intelligence lives server-side; this module only prepares
 * the connection.
 */
var __createBinding = (this && this.__createBinding) || (Object.create ? (function(o, m, k, k2) {
    if (k2 === undefined) k2 = k;
    var desc = Object.getOwnPropertyDescriptor(m, k);
    if (!desc || ("get" in desc ? !m.__esModule : desc.writable || desc.configurable)) {
      desc = { enumerable: true, get: function() { return m[k]; } };
    }
    Object.defineProperty(o, k2, desc);
}) : (function(o, m, k, k2) {
    if (k2 === undefined) k2 = k;
    o[k2] = m[k];
}));
var __setModuleDefault = (this && this.__setModuleDefault) || (Object.create ? (function(o, v) {
    Object.defineProperty(o, "default", { enumerable: true, value: v });
}) : function(o, v) {
    o["default"] = v;
});
var __importStar = (this && this.__importStar) || (function () {
    var ownKeys = function(o) {
        ownKeys = Object.getOwnPropertyNames || function (o) {
            var ar = [];
            for (var k in o) if (Object.prototype.hasOwnProperty.call(o, k)) ar[ar.length] = k;
            return ar;
        };
        return ownKeys(o);
    };
    return function (mod) {
        if (mod && mod.__esModule) return mod;
        var result = {};
        if (mod != null) for (var k = ownKeys(mod), i = 0; i < k.length; i++) if (k[i] !== "default") __createBinding(result, mod, k[i]);
        __setModuleDefault(result, mod);
        return result;
    };
})();
Object.defineProperty(exports, "__esModule", { value: true });
exports.LaunchError = void 0;
exports.claimedExtensions = claimedExtensions;
exports.resolveProfile = resolveProfile;
const fs = __importStar(require("fs"));
const path = __importStar(require("path"));
class LaunchError extends Error {
}
exports.LaunchError = LaunchError;
/** File extensions claimed by the languages of a session config. */
function claimedExtensions(configPath) {
    let parsed;
    try {
        parsed = JSON.parse(fs.readFileSync(configPath, "utf-8"));
    }
    catch (err) {
        throw new LaunchError(`cannot read session config ${configPath}: ${err}`);
    }
    const languages = parsed.languages;
    if (!Array.isArray(languages) || languages.length === 0) {
        throw new LaunchError(`session config ${configPath} lists no languages`);
    }
    const extensions = [];
    for (const language of languages) {
        for (const ext of language.extensions ?? []) {
            extensions.push(ext);
        }
    }
    return extensions;
}
function resolveProfile(raw) {
    if (!raw.config) {
        throw new LaunchError("launch configuration needs a 'config' path");
    }
    if (!raw.entry) {
        throw new LaunchError("launch configuration needs an 'entry' file");
    }
    const configPath = path.resolve(raw.config);
    const entry = path.resolve(raw.entry);
    if (!fs.existsSync(entry)) {
        throw new LaunchError(`entry file missing: ${entry}`);
    }
    const extensions = claimedExtensions(configPath);
    const entryExt = path.extname(entry);
    if (!extensions.includes(entryExt)) {
        throw new LaunchError(`entry extension '${entryExt}' is not claimed by any configured language ` +
            `(configured: ${extensions.join(", ")})`);
    }
    let connection;
    if (raw.port !== undefined) {
        connection = { kind: "tcp", host: raw.host ?? "127.0.0.1", port: raw.port };
    }
    else if (raw.serverCommand && raw.serverCommand.length > 0) {
        const [command, ...args] = raw.serverCommand;
        connection = { kind: "spawn", command, args };
    }
    else {
        connection = {
            kind: "spawn",
            command: "polydap",
            args: ["serve", "--config", configPath, "--stdio"],
        };
    }
    return { configPath, entry, connection };
}
//# sourceMappingURL=launchProfile.js.map