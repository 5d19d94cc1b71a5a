import { ApiClient } from './api';
import { renderDetail } from './detail';
import { renderHome } from './home';
import { showInfoModal } from './infoModal';
import { ViewModel } from './state';

const api = new ApiClient('/api');
const app = document.getElementById('app') as HTMLElement;

function cardActions(vm: ViewModel) {
  return {
    onOpen(movieId: number) {
      void api.sendEvent(vm.token, 'page_view', movieId);
    },
    async onRate(movieId: number, value: number) {
      await api.rate(vm.token, movieId, value);
    },
    async onWishlist(movieId: number) {
      await api.addToWishlist(vm.token, movieId);
    },
  };
}

async function showHome(vm: ViewModel): Promise<void> {
  const payload = await api.home(vm.token);
  renderHome(app, vm, payload, {
    ...cardActions(vm),
    onOpenBroadPage: () => {
      void api.sendEvent(vm.token, 'carousel_click', undefined, vm.treatment);
      void showDetail(vm);
    },
  });
}

async function showDetail(vm: ViewModel): Promise<void> {
  const firstPage = await api.broadPage(vm.token, 1);
  renderDetail(app, vm, firstPage, {
    ...cardActions(vm),
    loadPage: (page) => api.broadPage(vm.token, page),
    setLevel: (level) => api.setLevel(vm.token, level),
    onBack: () => void showHome(vm),
  });
}

async function start(userId: number): Promise<void> {
  const session = await api.openSession(userId);
  const vm = new ViewModel(session);
  if (vm.pendingInfoMessage) {
    showInfoModal(document.body, vm.pendingInfoMessage, () => {
      vm.acknowledgeInfo();
      void api.sendEvent(vm.token, 'info_ack');
    });
  }
  await showHome(vm);
}

function renderLogin(): void {
  app.textContent = '';
  const form = document.createElement('form');
  const input = document.createElement('input');
  input.type = 'number';
  input.placeholder = 'user id';
  const submit = document.createElement('button');
  submit.type = 'submit';
  submit.textContent = 'Log in';
  form.append(input, submit);
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const userId = Number(input.value);
    if (Number.isFinite(userId) && userId > 0) {
      start(userId).catch((error) => {
        const banner = document.createElement('p');
        banner.className = 'error-banner';
        banner.textContent = `login failed: ${error.message}`;
        form.appendChild(banner);
      });
    }
  });
  app.appendChild(form);
}

renderLogin();
