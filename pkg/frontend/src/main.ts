/**
 * Bootstrap: read service URL / token / reviewer from query parameters or
 * localStorage, wire the controller to the view, load the first page.
 */

import { ReviewApi } from './api.js';
import { ReviewController } from './controller.js';
import { ReviewView } from './view.js';

export interface BootOptions {
  baseUrl: string;
  token?: string;
  reviewer: string;
}

export function resolveOptions(location: Location, storage: Storage): BootOptions {
  const params = new URLSearchParams(location.search);
  const baseUrl =
    params.get('service') ?? storage.getItem('threatpath.service') ?? 'http://127.0.0.1:8080';
  const token = params.get('token') ?? storage.getItem('threatpath.token') ?? undefined;
  const reviewer =
    params.get('reviewer') ?? storage.getItem('threatpath.reviewer') ?? 'anonymous-sme';
  storage.setItem('threatpath.service', baseUrl);
  if (token) storage.setItem('threatpath.token', token);
  storage.setItem('threatpath.reviewer', reviewer);
  return { baseUrl, token, reviewer };
}

export function boot(root: HTMLElement, options: BootOptions): ReviewController {
  const api = new ReviewApi({ baseUrl: options.baseUrl, token: options.token });
  const controller = new ReviewController(api, options.reviewer);
  new ReviewView(root, controller, api).mount();
  void controller.load();
  return controller;
}

declare global {
  interface Window {
    threatpathReview?: ReviewController;
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  const root = document.getElementById('app') as HTMLElement;
  window.threatpathReview = boot(root, resolveOptions(window.location, window.localStorage));
}
