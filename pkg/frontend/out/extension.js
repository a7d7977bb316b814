"use strict";
/**
 * Debug extension entry point. Everything is delegated to the endpoint:
 * the factory merely spawns (or connects to) it, and the configuration
 * provider maps `entry` onto the standard `program` launch argument.
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
exports.activate = activate;
exports.deactivate = deactivate;
const vscode = __importStar(require("vscode"));
const launchProfile_1 = require("./launchProfile");
function activate(context) {
    context.subscriptions.push(vscode.debug.registerDebugConfigurationProvider("polydap", new PolydapConfigurationProvider()), vscode.debug.registerDebugAdapterDescriptorFactory("polydap", new PolydapAdapterFactory()));
}
function deactivate() { }
class PolydapConfigurationProvider {
    resolveDebugConfiguration(_folder, config) {
        if (!config.type) {
            config.type = "polydap";
            config.request = "launch";
            config.name = "Debug polyglot program";
        }
        if (config.entry && !config.program) {
            config.program = config.entry;
        }
        return config;
    }
}
class PolydapAdapterFactory {
    createDebugAdapterDescriptor(session) {
        let profile;
        try {
            profile = (0, launchProfile_1.resolveProfile)(session.configuration);
        }
        catch (err) {
            if (err instanceof launchProfile_1.LaunchError) {
                void vscode.window.showErrorMessage(`polydap: ${err.message}`);
                return undefined;
            }
            throw err;
        }
        if (profile.connection.kind === "tcp") {
            return new vscode.DebugAdapterServer(profile.connection.port, profile.connection.host);
        }
        return new vscode.DebugAdapterExecutable(profile.connection.command, profile.connection.args);
    }
}
//# sourceMappingURL=extension.js.map