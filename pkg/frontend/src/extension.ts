/**
 * Debug extension entry point. Everything is delegated to the endpoint:
 * the factory merely spawns (or connects to) it, and the configuration
 * provider maps `entry` onto the standard `program` launch argument.
 */

import * as vscode from "vscode";

import { LaunchError, RawLaunchConfig, resolveProfile } from "./launchProfile";

export function activate(context: vscode.ExtensionContext): void {
  context.subscriptions.push(
    vscode.debug.registerDebugConfigurationProvider(
      "polydap",
      new PolydapConfigurationProvider()
    ),
    vscode.debug.registerDebugAdapterDescriptorFactory(
      "polydap",
      new PolydapAdapterFactory()
    )
  );
}

export function deactivate(): void {}

class PolydapConfigurationProvider implements vscode.DebugConfigurationProvider {
  resolveDebugConfiguration(
    _folder: vscode.WorkspaceFolder | undefined,
    config: vscode.DebugConfiguration
  ): vscode.ProviderResult<vscode.DebugConfiguration> {
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

class PolydapAdapterFactory implements vscode.DebugAdapterDescriptorFactory {
  createDebugAdapterDescriptor(
    session: vscode.DebugSession
  ): vscode.ProviderResult<vscode.DebugAdapterDescriptor> {
    let profile;
    try {
      profile = resolveProfile(session.configuration as RawLaunchConfig);
    } catch (err) {
      if (err instanceof LaunchError) {
        void vscode.window.showErrorMessage(`polydap: ${err.message}`);
        return undefined;
      }
      throw err;
    }
    if (profile.connection.kind === "tcp") {
      return new vscode.DebugAdapterServer(
        profile.connection.port,
        profile.connection.host
      );
    }
    return new vscode.DebugAdapterExecutable(
      profile.connection.command,
      profile.connection.args
    );
  }
}
